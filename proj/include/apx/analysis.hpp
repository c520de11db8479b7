#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apx/schreiber.hpp"
#include "apx/verify.hpp"

namespace apx {

struct AnalysisOptions {
  double r_min_fraction = 0.5;  // far points: norm >= fraction * interior radius
  double cluster_tol = 0.05;
  double rank_tol = 0.1;
  double M = 0;  // <= 0: interior radius / 4
  double R = 0;  // <= 0: interior radius / 4
  TranslationOptions translation{};
  CertifyOptions certify{};
  SystemOptions system{};
};

/// Full abelian pipeline: translation set, asymptotic directions and their
/// span L, thickening around L, a well-spread system and the descent
/// certification of relative density around L.
struct Analysis {
  std::optional<TranslationSet> F;
  double K = 0;
  std::optional<DirectionSet> directions;
  std::optional<Subspace> L;
  double thickening = 0;
  double R = 0;
  std::optional<WellSpreadSystem> system;
  std::optional<Certification> certification;
  std::optional<DensityAround> density;
  bool passed = false;
  std::vector<std::string> notes;
};

/// Stops at the first stage that cannot run and records why in `notes`.
Analysis analyze(const PointSet& ps, const AnalysisOptions& opt = {});

}  // namespace apx
