#pragma once

// Model -> steady state -> first-order form -> spectral split -> (F, G).

#include <functional>
#include <memory>

#include "stabman/first_order.hpp"
#include "stabman/spectral.hpp"

namespace stabman {

struct PipelineOptions {
  double steady_tol = 1e-12;
  int steady_max_iter = 100;
  FirstOrderOptions first_order;
  SplitOptions split;
  double origin_tol = 1e-8;
  /// Optional change of basis within the u and v blocks, applied to the
  /// balanced split before (F, G) is assembled.
  std::function<SpectralSplit(const SpectralSplit&)> rescale;
};

struct Pipeline {
  ModelSpec model;
  SteadyState ss;
  std::shared_ptr<const FirstOrderSystem> first_order;
  std::shared_ptr<const TransformedSystem> system;

  const SpectralSplit& split() const { return system->split; }
};

inline Pipeline build_pipeline(const ModelSpec& model, const PipelineOptions& opt = {}) {
  Pipeline p;
  p.model = model;
  p.ss = find_steady_state(model, opt.steady_tol, opt.steady_max_iter);
  auto fo = std::make_shared<const FirstOrderSystem>(build_first_order(model, p.ss, opt.first_order));
  p.first_order = fo;
  SpectralSplit split = schur_split(fo->K, model.dims.n_u(), opt.split);
  if (opt.rescale) split = opt.rescale(split);
  p.system = std::make_shared<const TransformedSystem>(build_transformed(*fo, split, opt.origin_tol));
  return p;
}

}  // namespace stabman
