#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

// Gauss-Jordan inverse with partial pivoting.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

inline double sqdist(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    s += d * d;
  }
  return s;
}

// Greedy k-center recomputing every distance to every selected center.
inline std::vector<std::size_t> greedy_k_center(const std::vector<std::vector<float>>& pool, std::size_t n) {
  std::vector<std::size_t> sel{0};
  while (sel.size() < n) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (auto s : sel) d = std::min(d, sqdist(pool[i], pool[s]));
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    sel.push_back(best);
  }
  return sel;
}

inline double nn_distance(const std::vector<float>& q, const std::vector<std::vector<float>>& bank) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : bank) best = std::min(best, sqdist(q, b));
  return std::sqrt(best);
}

// Fraction of (positive, negative) pairs ordered correctly; ties count 1/2.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double good = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] && !y[j]) {
        total += 1.0;
        good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return good / total;
}

inline double f1_at(const std::vector<double>& s, const std::vector<std::uint8_t>& y, double t) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool p = s[i] >= t;
    if (p && y[i]) ++tp;
    if (p && !y[i]) ++fp;
    if (!p && y[i]) ++fn;
  }
  return 2 * tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

inline double exhaustive_best_f1(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double best = 0.0;
  for (double t : s) best = std::max(best, f1_at(s, y, t));
  return best;
}

// Flood-fill labelling with an explicit queue (BFS).
inline std::vector<int> regions_bfs(const std::vector<std::vector<int>>& mask, int& count) {
  const std::size_t h = mask.size(), w = mask[0].size();
  std::vector<int> lab(h * w, -1);
  count = 0;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      if (!mask[i][j] || lab[i * w + j] >= 0) continue;
      std::queue<std::pair<std::size_t, std::size_t>> q;
      q.push({i, j});
      lab[i * w + j] = count;
      while (!q.empty()) {
        auto [r, c] = q.front();
        q.pop();
        const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const long rr = static_cast<long>(r) + dr[k], cc = static_cast<long>(c) + dc[k];
          if (rr < 0 || cc < 0 || rr >= static_cast<long>(h) || cc >= static_cast<long>(w)) continue;
          if (mask[rr][cc] && lab[rr * w + cc] < 0) {
            lab[rr * w + cc] = count;
            q.push({static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)});
          }
        }
      }
      ++count;
    }
  return lab;
}

// AU-PRO by explicit threshold sweep: at every distinct value t (descending)
// recompute the predicted set {v >= t}, FPR and mean region overlap from
// scratch, then integrate the polyline from (0,0) up to `limit`.
inline double au_pro_sweep(const std::vector<std::vector<std::vector<double>>>& maps,
                           const std::vector<std::vector<std::vector<int>>>& masks, double limit) {
  std::vector<double> thresholds;
  for (const auto& m : maps)
    for (const auto& row : m) thresholds.insert(thresholds.end(), row.begin(), row.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<std::vector<int>> labels;
  std::vector<int> counts;
  for (const auto& mk : masks) {
    int c = 0;
    labels.push_back(regions_bfs(mk, c));
    counts.push_back(c);
  }
  std::vector<double> xs{0.0}, ys{0.0};
  for (double t : thresholds) {
    double fp = 0, neg = 0, overlap_sum = 0;
    int n_regions = 0;
    for (std::size_t m = 0; m < maps.size(); ++m) {
      const std::size_t w = maps[m][0].size();
      std::vector<double> hit(counts[m], 0), size(counts[m], 0);
      for (std::size_t i = 0; i < maps[m].size(); ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const bool pred = maps[m][i][j] >= t;
          const int l = labels[m][i * w + j];
          if (l < 0) {
            neg += 1;
            fp += pred;
          } else {
            size[l] += 1;
            hit[l] += pred;
          }
        }
      for (int r = 0; r < counts[m]; ++r) overlap_sum += hit[r] / size[r];
      n_regions += counts[m];
    }
    xs.push_back(fp / neg);
    ys.push_back(overlap_sum / n_regions);
  }
  double area = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double x0 = xs[k - 1], x1 = xs[k], y0 = ys[k - 1], y1 = ys[k];
    if (x1 >= limit) {
      const double yl = x1 > x0 ? y0 + (y1 - y0) * (limit - x0) / (x1 - x0) : y1;
      area += (limit - x0) * (y0 + yl) / 2;
      return area / limit;
    }
    area += (x1 - x0) * (y0 + y1) / 2;
  }
  return area / limit;
}

// Mel energies of one Hann-windowed frame via a direct O(N^2) DFT.
inline std::vector<double> direct_mel_energies(const std::vector<double>& frame, int sr, int n_mels,
                                               double fmin, double fmax) {
  const std::size_t n = frame.size();
  std::vector<double> power(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double win = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / n);
      acc += win * frame[i] * std::exp(std::complex<double>(0, -2 * std::numbers::pi * k * i / n));
    }
    power[k] = std::norm(acc);
  }
  auto mel = [](double f) { return 2595 * std::log10(1 + f / 700); };
  auto hz = [](double m) { return 700 * (std::pow(10, m / 2595) - 1); };
  std::vector<double> e(n_mels, 0.0);
  for (int b = 0; b < n_mels; ++b) {
    const double lo = hz(mel(fmin) + (mel(fmax) - mel(fmin)) * b / (n_mels + 1));
    const double c = hz(mel(fmin) + (mel(fmax) - mel(fmin)) * (b + 1) / (n_mels + 1));
    const double hi = hz(mel(fmin) + (mel(fmax) - mel(fmin)) * (b + 2) / (n_mels + 1));
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double f = static_cast<double>(k) * sr / n;
      double wgt = 0;
      if (f > lo && f <= c) wgt = (f - lo) / (c - lo);
      else if (f > c && f < hi) wgt = (hi - f) / (hi - c);
      e[b] += wgt * power[k];
    }
  }
  return e;
}

}  // namespace oracle
