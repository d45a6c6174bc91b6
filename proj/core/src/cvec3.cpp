#include "ncihf/cvec3.hpp"

#include <algorithm>

namespace ncihf {

double max_abs(const CVec3& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

CMat3 CMat3::identity() {
    CMat3 r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
    return r;
}

CVec3 CMat3::operator*(const CVec3& v) const {
    CVec3 r;
    for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return r;
}

CMat3 CMat3::operator*(const CMat3& o) const {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
    return r;
}

CMat3 CMat3::transpose() const {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

CMat3 operator+(const CMat3& a, const CMat3& b) {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

CMat3 operator*(cplx k, const CMat3& a) {
    CMat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = k * a.m[i][j];
    return r;
}

CMat3 cross_matrix(const CVec3& v) {
    CMat3 r;
    r.m[0][1] = -v[2];
    r.m[0][2] = v[1];
    r.m[1][0] = v[2];
    r.m[1][2] = -v[0];
    r.m[2][0] = -v[1];
    r.m[2][1] = v[0];
    return r;
}

}  // namespace ncihf
