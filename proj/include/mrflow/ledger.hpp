#pragma once

namespace mrflow {

/// Exact tally of right-hand-side evaluations per region: number of calls and
/// total elements touched. The element totals are the work measure behind the
/// speedup model. Incremented from the integrator thread only.
struct RhsEvalLedger {
    long fast_evals = 0, buffer_evals = 0, slow_evals = 0;
    long fast_elements = 0, buffer_elements = 0, slow_elements = 0;

    void record_fast(long elements) { ++fast_evals; fast_elements += elements; }
    void record_buffer(long elements) { ++buffer_evals; buffer_elements += elements; }
    void record_slow(long elements) { ++slow_evals; slow_elements += elements; }

    long total_elements() const { return fast_elements + buffer_elements + slow_elements; }
    void reset() { *this = RhsEvalLedger{}; }
};

}  // namespace mrflow
