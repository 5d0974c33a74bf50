#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lglat/mat.hpp"
#include "lglat/rng.hpp"

namespace lglat {

// Latent code indices are 1-based: entries lie in [1..K]. Row j-1 of the
// codebook holds the vector of code j.
struct LatentSeq {
  std::vector<int> z;

  size_t size() const { return z.size(); }
  int operator[](size_t i) const { return z[i]; }
};

template <typename T>
struct Codebook {
  Mat<T> q;           // K x d_model
  std::vector<T> c;   // assignment counts
  T lambda = T(0.999);

  int K() const { return static_cast<int>(q.rows()); }
  int dim() const { return static_cast<int>(q.cols()); }

  static Codebook init(int K, int d_model, T lambda, Rng rng) {
    if (K < 2) throw std::invalid_argument("codebook needs K >= 2");
    Codebook book;
    book.lambda = lambda;
    book.q.resize(K, d_model);
    T stddev = T(1) / std::sqrt(T(d_model));
    for (int j = 0; j < K; ++j)
      for (int d = 0; d < d_model; ++d) book.q(j, d) = static_cast<T>(rng.normal()) * stddev;
    book.c.assign(static_cast<size_t>(K), T(1));
    return book;
  }
};

// Nearest code per row, ties to the lowest index. Plain scalar loops keep the
// comparison order identical to an exhaustive-search oracle.
template <typename T>
LatentSeq assign(const Mat<T>& reprs, const Codebook<T>& book) {
  if (reprs.cols() != book.q.cols())
    throw std::invalid_argument("repr dim " + std::to_string(reprs.cols()) +
                                " does not match codebook dim " + std::to_string(book.q.cols()));
  LatentSeq seq;
  seq.z.resize(static_cast<size_t>(reprs.rows()));
  for (Eigen::Index i = 0; i < reprs.rows(); ++i) {
    T best = T(0);
    int best_j = -1;
    for (int j = 0; j < book.K(); ++j) {
      T dist = T(0);
      for (Eigen::Index d = 0; d < reprs.cols(); ++d) {
        T diff = reprs(i, d) - book.q(j, d);
        dist += diff * diff;
      }
      if (!std::isfinite(static_cast<double>(dist)))
        throw std::invalid_argument("non-finite representation at row " + std::to_string(i));
      if (best_j < 0 || dist < best) {
        best = dist;
        best_j = j;
      }
    }
    seq.z[static_cast<size_t>(i)] = best_j + 1;
  }
  return seq;
}

// EMA codebook maintenance. Counts are updated first; the vector update
// divides by the updated count (floored at 1e-6). Codes with no batch mass
// still decay: q_j <- lambda * q_j.
template <typename T>
void ema_update(Codebook<T>& book, const Mat<T>& reprs, const LatentSeq& z) {
  if (static_cast<Eigen::Index>(z.size()) != reprs.rows())
    throw std::invalid_argument("assignment count does not match batch rows");
  const int K = book.K();
  std::vector<T> batch_count(static_cast<size_t>(K), T(0));
  Mat<T> batch_sum = Mat<T>::Zero(K, book.dim());
  for (Eigen::Index i = 0; i < reprs.rows(); ++i) {
    int j = z[static_cast<size_t>(i)] - 1;
    if (j < 0 || j >= K) throw std::out_of_range("latent index out of range");
    batch_count[static_cast<size_t>(j)] += T(1);
    batch_sum.row(j) += reprs.row(i);
  }
  const T lam = book.lambda;
  for (int j = 0; j < K; ++j) {
    book.c[static_cast<size_t>(j)] =
        lam * book.c[static_cast<size_t>(j)] + (T(1) - lam) * batch_count[static_cast<size_t>(j)];
    T denom = std::max(book.c[static_cast<size_t>(j)], T(1e-6));
    book.q.row(j) = lam * book.q.row(j) + (T(1) - lam) * (batch_sum.row(j) / denom);
  }
}

template <typename T>
Mat<T> lookup(const LatentSeq& z, const Codebook<T>& book) {
  Mat<T> out(static_cast<Eigen::Index>(z.size()), book.dim());
  for (size_t i = 0; i < z.size(); ++i) {
    int j = z[i] - 1;
    if (j < 0 || j >= book.K())
      throw std::out_of_range("latent index " + std::to_string(z[i]) + " out of range [1.." +
                              std::to_string(book.K()) + "]");
    out.row(static_cast<Eigen::Index>(i)) = book.q.row(j);
  }
  return out;
}

// Replaces codes whose count fell below threshold with a random batch row.
// Returns the number of codes reseeded.
template <typename T>
int reseed_dead_codes(Codebook<T>& book, const Mat<T>& reprs, T threshold, Rng& rng,
                      std::string* warning = nullptr) {
  if (threshold <= T(0)) return 0;
  int reseeded = 0;
  for (int j = 0; j < book.K(); ++j) {
    if (book.c[static_cast<size_t>(j)] < threshold) {
      if (reprs.rows() == 0) {
        if (warning) *warning = "dead codes present but batch is empty; skipping reseed";
        return 0;
      }
      Eigen::Index pick = static_cast<Eigen::Index>(rng.uniform_int(static_cast<uint64_t>(reprs.rows())));
      book.q.row(j) = reprs.row(pick);
      book.c[static_cast<size_t>(j)] = T(1);
      ++reseeded;
    }
  }
  return reseeded;
}

// Inspection dump: {K, lambda, counts[], vector_norms[]}
std::string codebook_inspect_json(const Codebook<float>& book);

}  // namespace lglat
