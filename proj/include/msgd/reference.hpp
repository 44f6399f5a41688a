#pragma once

#include "msgd/objective.hpp"

namespace msgd::reference {

// Plain single-threaded implementations of the objective kernels, written
// as straight loops with no blocking. They are the comparison baseline for
// the parallel kernels in tests and in the benchmark tool.

PartitionSummary partition(const ModelBank& bank, const Population& pop, const LossModel& loss);

ObjectiveReport evaluate(const ModelBank& bank, const Population& pop, const LossModel& loss,
                         double zeta);

std::vector<Vec> gradient_f(const ModelBank& bank, const Population& pop, const LossModel& loss,
                            double zeta);

double stationarity_residual(const ModelBank& bank, const Population& pop, const LossModel& loss,
                             double zeta);

}  // namespace msgd::reference
