#pragma once

#include "periods/system.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace periods {

enum class SingularityKind { Center, Cusp, Saddle, Degenerate };

std::string singularity_kind_name(SingularityKind k);

struct Singularity {
    double x = 0.0;
    double y = 0.0;
    SingularityKind kind = SingularityKind::Center;
    double energy = 0.0;
    std::optional<Rational> energy_exact;
};

struct LedgerEntry {
    double h = 0.0;
    std::optional<Rational> h_exact;
    Singularity source;
};

/// Sorted critical Hamiltonian values of the unperturbed skeleton.
/// entries[0] is the center at h = 0. For even families the saddle energy is
/// appended as the last entry and bounds the period annulus from above; all
/// earlier entries are "interior". min_gap is the smallest consecutive
/// difference (0 for a certified collision).
struct EnergyLedger {
    std::vector<LedgerEntry> entries;
    bool saddle_bounded = false;
    double min_gap = 0.0;

    std::size_t interior_count() const {
        return entries.size() - (saddle_bounded ? 1 : 0);
    }
    /// +inf for odd families, the saddle energy for even ones.
    double upper_bound() const;
};

struct HypothesisVerdict {
    bool distinct = false;
    enum class Method { NumericGap, ExactRationalPairs } method = Method::NumericGap;
    double min_gap = 0.0;
    std::optional<std::pair<Singularity, Singularity>> witness;
    std::optional<bool> dominance_ok;  // even families: saddle energy dominates
    double tolerance = 0.0;            // relative tolerance the verdict used
};

/// All singularities of the unperturbed system (epsilon must be 0):
/// the center, the axis cusps, the mixed-grid degenerate points, and the
/// saddle for even families. Throws ValidationError for epsilon > 0 (the
/// perturbed system has a unique equilibrium, a global center).
std::vector<Singularity> singular_points(const System& sys);

/// Ledger of the eps=0 skeleton of `sys` (built internally even when
/// sys.spec.epsilon > 0). Energies are exact rationals whenever the
/// parameters are; entries are sorted ascending. Throws HypothesisError only
/// when two float-only energies are too close to order reliably; certified
/// exact collisions are kept as adjacent equal entries so the hypothesis
/// check can report the witness.
EnergyLedger critical_energy_ledger(const System& sys);

HypothesisVerdict check_hypothesis_numeric(const EnergyLedger& ledger, double tol = 1e-9);

/// Exact certification for the e-scaled example families: evaluates the
/// integer-argument antiderivative sequences in rational arithmetic and
/// decides distinctness (and saddle dominance for even parity) without ever
/// approximating e in floating point.
enum class Parity { Odd, Even };
HypothesisVerdict certify_example_family(int k, Parity parity);

/// Routes an e-scaled system to certify_example_family; throws
/// ValidationError for other systems (use check_hypothesis_numeric).
HypothesisVerdict certify_system(const System& sys);

nlohmann::json ledger_to_json(const EnergyLedger& ledger);
nlohmann::json verdict_to_json(const HypothesisVerdict& v);

}  // namespace periods
