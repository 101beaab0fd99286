#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2d {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Invalid user-supplied configuration. `key()` holds the dotted path of the
/// offending field when one is known, e.g. "geometry.cell_radius".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// SINR targets that no finite power vector can meet, or an RB plan that
/// cannot stay orthogonal.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal consistency failure (an invariant of a produced structure broke).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Dense row-major square matrix. Small (tens of rows); used for gain tables.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

} // namespace d2d
