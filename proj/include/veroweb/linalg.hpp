#pragma once

#include <array>
#include <cstdlib>

namespace veroweb {

template <typename T>
using Mat3T = std::array<std::array<T, 3>, 3>;
template <typename T>
using Mat4T = std::array<std::array<T, 4>, 4>;

using Vec3 = std::array<double, 3>;
using Mat3 = Mat3T<double>;
using Mat4 = Mat4T<double>;

// Explicit adjugate formulas: exact degree bookkeeping when T is an
// expression type, no solver noise when T is double.

template <typename T>
T det3(const Mat3T<T>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Classical adjugate: inv(m) = adjugate3(m) / det3(m).
template <typename T>
Mat3T<T> adjugate3(const Mat3T<T>& m) {
  Mat3T<T> a;
  a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return a;
}

inline Mat3 inv3(const Mat3& m, double det) {
  Mat3 a = adjugate3(m);
  for (auto& row : a)
    for (double& v : row) v /= det;
  return a;
}

template <typename T>
T det4(const Mat4T<T>& m) {
  const auto minor3 = [&](int r, int c) {
    Mat3T<T> s;
    int si = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == r) continue;
      int sj = 0;
      for (int j = 0; j < 4; ++j) {
        if (j == c) continue;
        s[si][sj] = m[i][j];
        ++sj;
      }
      ++si;
    }
    return det3(s);
  };
  T d = m[0][0] * minor3(0, 0) - m[0][1] * minor3(0, 1);
  d = d + m[0][2] * minor3(0, 2);
  d = d - m[0][3] * minor3(0, 3);
  return d;
}

/// Classical adjugate: inv(m) = adjugate4(m) / det4(m).
template <typename T>
Mat4T<T> adjugate4(const Mat4T<T>& m) {
  Mat4T<T> a;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Mat3T<T> s;
      int si = 0;
      for (int i = 0; i < 4; ++i) {
        if (i == r) continue;
        int sj = 0;
        for (int j = 0; j < 4; ++j) {
          if (j == c) continue;
          s[si][sj] = m[i][j];
          ++sj;
        }
        ++si;
      }
      const T cof = det3(s);
      // cofactor sign, transposed into the adjugate slot
      a[c][r] = ((r + c) % 2 == 0) ? cof : -cof;
    }
  }
  return a;
}

/// Sign of the permutation (a,b,c,d) of {0,1,2,3}; 0 when indices repeat.
inline int levi_civita4(int a, int b, int c, int d) {
  const int idx[4] = {a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

/// Same for five indices over {0,...,4}.
inline int levi_civita5(int a, int b, int c, int d, int e) {
  const int idx[5] = {a, b, c, d, e};
  int sign = 1;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  return sign;
}

}  // namespace veroweb
