#pragma once

#include "aad/audio/spectrogram.hpp"
#include "aad/features/convnet.hpp"
#include "aad/features/pyramid.hpp"

namespace aad::features {

inline constexpr std::size_t kMinExtractorInput = 8;

// Frozen, seeded stand-in for a pretrained backbone. Immutable once built;
// safe to share between threads.
class ReferenceExtractor {
 public:
  explicit ReferenceExtractor(ExtractorSpec spec) : spec_(std::move(spec)) {
    require(spec_.kind == ExtractorKind::reference, Errc::parameter,
            "reference extractor requires kind = reference");
    spec_.validate();
    net_ = ConvNet::he_init(spec_.channels_per_block, spec_.seed);
  }

  const ExtractorSpec& spec() const noexcept { return spec_; }
  const ConvNet& net() const noexcept { return net_; }

  FeatureMapPyramid operator()(const Matrix<double>& values) const {
    require(values.rows() >= kMinExtractorInput && values.cols() >= kMinExtractorInput,
            Errc::size,
            "spectrogram " + std::to_string(values.rows()) + "x" + std::to_string(values.cols()) +
                " is smaller than 8x8");
    const auto tr = net_.forward(as_image(values), net_.depth());
    FeatureMapPyramid p;
    p.source_rows = values.rows();
    p.source_cols = values.cols();
    for (std::size_t b = 0; b < tr.outputs.size(); ++b) {
      p.levels.push_back(tr.outputs[b].cast<float>());
      p.level_names.push_back(level_name(b));
    }
    return p;
  }

  FeatureMapPyramid operator()(const audio::Spectrogram& s) const { return (*this)(s.values); }

 private:
  ExtractorSpec spec_;
  ConvNet net_;
};

inline FeatureMapPyramid reference_extract(const audio::Spectrogram& s, const ExtractorSpec& spec) {
  return ReferenceExtractor(spec)(s);
}

}  // namespace aad::features
