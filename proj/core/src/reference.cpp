#include "netpot/reference.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cstdlib>
#include <string>

#include "netpot/errors.hpp"

namespace netpot {

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;

std::pair<long, long> parse_grid_label(const std::string& s) {
    long x = 0, y = 0;
    char open = 0, comma = 0, close = 0;
    if (std::sscanf(s.c_str(), "%c%ld%c%ld%c", &open, &x, &comma, &y, &close) != 5 || open != '(' ||
        comma != ',' || close != ')')
        throw Error(Errc::InvalidArgument, "not a grid label: " + s);
    return {x, y};
}

} // namespace

PotentialKernelZ2::PotentialKernelZ2(int extent) : extent_(extent) {
    if (extent < 1 || extent > 120)
        throw Error(Errc::InvalidArgument, "extent must lie in [1, 120]");
    const int n = extent + 1;
    std::vector<std::vector<Real>> a(n + 1, std::vector<Real>(n + 2));
    auto at = [&](int x, int y) -> Real& {
        y = std::abs(y);
        return x >= y ? a[x][y] : a[y][x];
    };
    const Real pi = boost::math::constants::pi<Real>();
    Real diag = 0;
    a[0][0] = 0;
    a[1][0] = 1;
    diag = 4 / pi;
    a[1][1] = diag;
    for (int x = 1; x < n; ++x) {
        // Row x + 1 from rows x and x - 1 by harmonicity at (x, y).
        for (int y = 0; y + 1 <= x; ++y)
            a[x + 1][y] = 4 * at(x, y) - at(x - 1, y) - at(x, y + 1) - at(x, y - 1);
        a[x + 1][x] = 2 * at(x, x) - at(x, x - 1);
        diag += 4 / (pi * (2 * (x + 1) - 1));
        a[x + 1][x + 1] = diag;
    }
    table_.resize(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
    for (int x = 0; x <= n; ++x)
        for (int y = 0; y <= x; ++y)
            table_[static_cast<std::size_t>(x * (x + 1) / 2 + y)] = static_cast<double>(a[x][y]);
}

double PotentialKernelZ2::operator()(long x, long y) const {
    x = std::labs(x);
    y = std::labs(y);
    if (x < y)
        std::swap(x, y);
    if (x > extent_ + 1)
        throw Error(Errc::InvalidArgument, "point outside the potential kernel table");
    return table_[static_cast<std::size_t>(x * (x + 1) / 2 + y)];
}

PotentialOnBall grid_reference_potential(std::shared_ptr<const Ball> ball, Tolerances tol) {
    PotentialKernelZ2 kernel(ball->radius());
    std::vector<double> values(ball->size());
    for (std::size_t i = 0; i < ball->size(); ++i) {
        const auto [x, y] = parse_grid_label(ball->label(i).label());
        values[i] = kernel(x, y) / 4.0;
    }
    return PotentialOnBall(std::move(ball), std::move(values), 1.0, tol);
}

PotentialOnBall line_positive_part(std::shared_ptr<const Ball> ball, Tolerances tol) {
    std::vector<double> values(ball->size());
    for (std::size_t i = 0; i < ball->size(); ++i)
        values[i] = std::max(0.0, static_cast<double>(std::stol(ball->label(i).label())));
    return PotentialOnBall(std::move(ball), std::move(values), 1.0, tol);
}

double line_green(long x, long y, long radius) {
    if (x <= 0 || y <= 0 || x >= radius || y >= radius) {
        if (x < 0 && y < 0)
            return line_green(-x, -y, radius);
        return 0.0;
    }
    return static_cast<double>(std::min(x, y)) * static_cast<double>(radius - std::max(x, y)) /
           static_cast<double>(radius);
}

} // namespace netpot
