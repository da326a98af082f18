#pragma once

#include <random>

namespace conefract {

template <typename Rng>
Vector sample_face_point(const FaceDescriptor& F, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x = Vector::Zero(F.cone.dim());
  for (std::size_t j = 0; j < F.blocks.size(); ++j) {
    const ConeBlock& b = F.cone.block(j);
    auto xj = x.segment(F.cone.offset(j), b.coords());
    if (auto* nf = std::get_if<NonNegFace>(&F.blocks[j])) {
      for (Index i : nf->support) xj(i) = unif(rng);
    } else if (auto* sf = std::get_if<SocFace>(&F.blocks[j])) {
      if (sf->state == SocFace::State::Full) {
        for (Index i = 1; i < b.size; ++i) xj(i) = gauss(rng);
        xj(0) = xj.tail(b.size - 1).norm() + unif(rng);
      } else if (sf->state == SocFace::State::Ray) {
        xj = unif(rng) * sf->ray;
      }
    } else {
      const Matrix& U = std::get<PsdFace>(F.blocks[j]).basis;
      Matrix G(U.cols(), U.cols());
      for (Index r = 0; r < G.rows(); ++r)
        for (Index c = 0; c < G.cols(); ++c) G(r, c) = gauss(rng);
      xj = svec(U * G * G.transpose() * U.transpose());
    }
  }
  return x;
}

}  // namespace conefract
