#include "nlac/parallel.hpp"

#include "nlac/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlac {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotBistable: return "NotBistable";
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorKind::StiffnessFailure: return "StiffnessFailure";
    case ErrorKind::QuadratureSingular: return "QuadratureSingular";
    case ErrorKind::FredholmViolation: return "FredholmViolation";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::BadInterface: return "BadInterface";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::LinearSolveFailed: return "LinearSolveFailed";
    case ErrorKind::EmptyContour: return "EmptyContour";
    case ErrorKind::InterfaceVanished: return "InterfaceVanished";
    case ErrorKind::Extinction: return "Extinction";
    case ErrorKind::NoAdmissibleK: return "NoAdmissibleK";
    case ErrorKind::FlowFailure: return "FlowFailure";
    case ErrorKind::OutOfTable: return "OutOfTable";
    case ErrorKind::NeverGenerated: return "NeverGenerated";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

void parallel_rows(std::size_t rows, int workers, const std::function<void(std::size_t)>& body) {
#ifdef _OPENMP
  if (workers > 1) {
    const auto n = static_cast<long>(rows);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (long j = 0; j < n; ++j) body(static_cast<std::size_t>(j));
    return;
  }
#else
  (void)workers;
#endif
  for (std::size_t j = 0; j < rows; ++j) body(j);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace nlac
