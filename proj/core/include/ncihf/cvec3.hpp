#pragma once

#include <array>
#include <complex>

namespace ncihf {

using cplx = std::complex<double>;

// Complex 3-vector. dot() is bilinear: no conjugation anywhere.
struct CVec3 {
    std::array<cplx, 3> c{};

    constexpr CVec3() = default;
    constexpr CVec3(cplx x, cplx y, cplx z) : c{x, y, z} {}

    constexpr cplx& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    constexpr const cplx& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    CVec3& operator+=(const CVec3& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] += o[i];
        return *this;
    }
    CVec3& operator-=(const CVec3& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] -= o[i];
        return *this;
    }
    CVec3& operator*=(cplx k) {
        for (auto& x : c) x *= k;
        return *this;
    }
    bool operator==(const CVec3&) const = default;
};

inline CVec3 operator+(CVec3 a, const CVec3& b) { return a += b; }
inline CVec3 operator-(CVec3 a, const CVec3& b) { return a -= b; }
inline CVec3 operator-(CVec3 a) { return a *= -1.0; }
inline CVec3 operator*(cplx k, CVec3 a) { return a *= k; }
inline CVec3 operator*(CVec3 a, cplx k) { return a *= k; }
inline CVec3 operator*(double k, CVec3 a) { return a *= k; }
inline CVec3 operator/(CVec3 a, cplx k) { return a *= 1.0 / k; }

inline cplx dot(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline CVec3 conj(const CVec3& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }

// s . s*, real and non-negative
inline double herm_norm2(const CVec3& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]); }

// max-abs over components, used for residual reporting
double max_abs(const CVec3& a);

// Complex 3x3 matrix, row-major.
struct CMat3 {
    std::array<std::array<cplx, 3>, 3> m{};

    static CMat3 identity();
    CVec3 operator*(const CVec3& v) const;
    CMat3 operator*(const CMat3& o) const;
    CMat3 transpose() const;
};

CMat3 operator+(const CMat3& a, const CMat3& b);
CMat3 operator*(cplx k, const CMat3& a);

// Matrix of v cross (.)
CMat3 cross_matrix(const CVec3& v);

}  // namespace ncihf
