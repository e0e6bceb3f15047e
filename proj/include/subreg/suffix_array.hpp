// Copyright 2026 The subreg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBREG_SUFFIX_ARRAY_HPP_
#define SUBREG_SUFFIX_ARRAY_HPP_

#include <algorithm>
#include <numeric>
#include <vector>

namespace subreg::suffix_array {

namespace detail {

inline std::vector<int> NaiveSort(const std::vector<int>& s) {
  std::vector<int> sa(s.size());
  std::iota(sa.begin(), sa.end(), 0);
  std::sort(sa.begin(), sa.end(), [&](int a, int b) {
    return std::lexicographical_compare(s.begin() + a, s.end(), s.begin() + b,
                                        s.end());
  });
  return sa;
}

}  // namespace detail

// Suffix array by induced sorting (SA-IS), linear time. Symbols must lie in
// [0, upper]. No terminal sentinel is required.
inline std::vector<int> Build(const std::vector<int>& s, int upper) {
  const int n = static_cast<int>(s.size());
  if (n < 16) return detail::NaiveSort(s);

  std::vector<int> sa(n);
  std::vector<bool> is_s(n);  // S-type: suffix i < suffix i+1
  for (int i = n - 2; i >= 0; --i) {
    is_s[i] = (s[i] == s[i + 1]) ? is_s[i + 1] : (s[i] < s[i + 1]);
  }

  // Bucket starts: sum_l[c] is the first L slot of c, sum_s[c] the first S.
  std::vector<int> sum_l(upper + 2, 0), sum_s(upper + 2, 0);
  for (int i = 0; i < n; ++i) {
    if (!is_s[i]) {
      ++sum_s[s[i]];
    } else {
      ++sum_l[s[i] + 1];
    }
  }
  for (int c = 0; c <= upper; ++c) {
    sum_s[c] += sum_l[c];
    if (c < upper) sum_l[c + 1] += sum_s[c];
  }

  auto induce = [&](const std::vector<int>& lms) {
    std::fill(sa.begin(), sa.end(), -1);
    std::vector<int> buf(sum_s.begin(), sum_s.end());
    for (int d : lms) {
      if (d != n) sa[buf[s[d]]++] = d;
    }
    buf.assign(sum_l.begin(), sum_l.end());
    sa[buf[s[n - 1]]++] = n - 1;
    for (int i = 0; i < n; ++i) {
      const int v = sa[i];
      if (v >= 1 && !is_s[v - 1]) sa[buf[s[v - 1]]++] = v - 1;
    }
    buf.assign(sum_l.begin(), sum_l.end());
    for (int i = n - 1; i >= 0; --i) {
      const int v = sa[i];
      if (v >= 1 && is_s[v - 1]) sa[--buf[s[v - 1] + 1]] = v - 1;
    }
  };

  std::vector<int> lms_index(n + 1, -1);
  std::vector<int> lms;
  for (int i = 1; i < n; ++i) {
    if (!is_s[i - 1] && is_s[i]) {
      lms_index[i] = static_cast<int>(lms.size());
      lms.push_back(i);
    }
  }
  const int m = static_cast<int>(lms.size());

  induce(lms);

  if (m > 0) {
    std::vector<int> sorted_lms;
    sorted_lms.reserve(m);
    for (int v : sa) {
      if (lms_index[v] != -1) sorted_lms.push_back(v);
    }
    // Name LMS substrings; equal substrings share a name.
    std::vector<int> reduced(m);
    int names = 0;
    reduced[lms_index[sorted_lms[0]]] = 0;
    for (int i = 1; i < m; ++i) {
      int l = sorted_lms[i - 1];
      int r = sorted_lms[i];
      const int end_l = (lms_index[l] + 1 < m) ? lms[lms_index[l] + 1] : n;
      const int end_r = (lms_index[r] + 1 < m) ? lms[lms_index[r] + 1] : n;
      bool same = true;
      if (end_l - l != end_r - r) {
        same = false;
      } else {
        while (l < end_l && s[l] == s[r]) {
          ++l;
          ++r;
        }
        if (l == n || s[l] != s[r]) same = false;
      }
      if (!same) ++names;
      reduced[lms_index[sorted_lms[i]]] = names;
    }

    const std::vector<int> reduced_sa = Build(reduced, names);
    for (int i = 0; i < m; ++i) sorted_lms[i] = lms[reduced_sa[i]];
    induce(sorted_lms);
  }
  return sa;
}

// Kasai et al.: lcp[i] = longest common prefix of suffixes sa[i-1] and sa[i];
// lcp[0] = 0.
inline std::vector<int> BuildLcp(const std::vector<int>& s,
                                 const std::vector<int>& sa) {
  const int n = static_cast<int>(s.size());
  std::vector<int> rank(n), lcp(n, 0);
  for (int i = 0; i < n; ++i) rank[sa[i]] = i;
  int h = 0;
  for (int i = 0; i < n; ++i) {
    if (rank[i] == 0) {
      h = 0;
      continue;
    }
    const int j = sa[rank[i] - 1];
    while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
    lcp[rank[i]] = h;
    if (h > 0) --h;
  }
  return lcp;
}

}  // namespace subreg::suffix_array

#endif  // SUBREG_SUFFIX_ARRAY_HPP_
