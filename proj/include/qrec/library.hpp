// Canonical scenarios: the two-probe double slit, the single Wigner's
// friend in both of Wigner's measurement choices, and the two-friends,
// two-Wigners setup in each record regime.

#pragma once

#include "qrec/scenario.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrec {

enum class Regime { BothErased, FbarPreserved, FPreserved, BothPreserved };

inline constexpr Regime kAllRegimes[] = {Regime::BothErased, Regime::FbarPreserved,
                                         Regime::FPreserved, Regime::BothPreserved};

/// "BOTH_ERASED", "FBAR_PRESERVED", ...
const char* to_string(Regime r);
/// "both_erased", ... as used in file names and on the command line.
std::string slug(Regime r);
/// Case-insensitive; accepts either spelling above.
std::optional<Regime> parse_regime(std::string_view text);

/// Coefficients of the second basis in terms of the first:
/// fail = alpha up + beta down, ok = gamma up + delta down.
struct SecondBasis {
  Amplitude alpha, beta, gamma, delta;
};

/// s0 = (0.6, 0.8) and a Hadamard second basis; for these the engaged and
/// free probabilities of `ok` differ (1/2 against 1/50).
SecondBasis default_second_basis();
CVector<double> default_s0();

/// Spin measured by F in {up, down} (if engaged) and then by W in
/// {fail, ok}. Throws std::invalid_argument when the coefficients do not
/// form a unitary matrix or s0 is not a normalized 2-vector.
Scenario double_slit(const SecondBasis& c, const CVector<double>& s0, bool engage_first_probe);

enum class WfsCase { I, II };

/// Case I: W measures the spin only, F's record survives. Case II: W
/// measures the whole laboratory and F's record is erased.
Scenario wigner_friend(WfsCase which, const SecondBasis& c, const CVector<double>& s0);

/// Coin and spin prepared in (|heads> + sqrt2 |tails>)/sqrt3 (x) |down>,
/// with the coin measured by Fbar, the controlled rotation, the spin
/// measured by F, then Wbar and W measuring in the fail/ok bases.
Scenario two_wigners(Regime r);

struct Builtin {
  std::string name;
  std::vector<std::string> variants;  // first one is the default
};

const std::vector<Builtin>& builtins();

/// Resolves a builtin by name and optional variant (regime, case or
/// engagement). Throws std::invalid_argument for unknown names or variants.
Scenario builtin(const std::string& name, const std::string& variant = "");

struct ShippedScenario {
  std::string file;  // e.g. "2w2f_both_erased.scn"
  Scenario scenario;
};

/// Generator output for every shipped .scn file.
std::vector<ShippedScenario> shipped_scenarios();

}  // namespace qrec
