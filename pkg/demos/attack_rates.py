#!/usr/bin/env python3
"""Measure the classical attack surfaces against their analytic values.

Three adversaries, in increasing order of information:
  - impersonation: inject a forged (message, tag) blind; succeeds 1/|T|.
  - substitution: observe one honest pair, replace it; succeeds <= epsilon.
  - response forgery: block the responder and fake the key-reveal; the best
    guess lives in the key set consistent with the observed tag, |T|/|K|.

Small widths run exhaustively (exact rational rates); width 8 runs seeded
Monte Carlo and is checked against the same analytic values.

Usage: python demos/attack_rates.py
"""

from awrauth.adversary import (
    consistent_key_substitution,
    estimate_impersonation,
    estimate_response_forge,
    estimate_substitution,
    substitution_family_sweep,
)
from awrauth.asu2 import FamilyParams

P2 = FamilyParams(tag_bits=2, max_blocks=1)
P8 = FamilyParams(tag_bits=8, max_blocks=4)

print("== impersonation ==")
exact = estimate_impersonation(P2, trials=1, method="exhaustive")
print(f"width 2 exhaustive: {exact.successes}/{exact.trials} = {exact.rate} "
      f"(analytic 1/|T| = {exact.bound})")
mc = estimate_impersonation(P8, trials=10**6, rng_seed=7, method="sampled")
print(f"width 8, 10^6 seeded trials: {mc.rate:.6f} +- {mc.stderr:.2e} "
      f"(analytic {float(mc.bound):.6f}) within band: {mc.passed}")

print()
print("== substitution ==")
best = estimate_substitution(P2, consistent_key_substitution(P2), trials=1,
                             method="exhaustive")
print(f"consistent-key rule, width 2: rate {best.rate} = epsilon {best.bound}")
sweep = substitution_family_sweep(FamilyParams(tag_bits=4, max_blocks=3))
worst_rule, worst_rate = max(sweep, key=lambda rr: rr[1])
print(f"family sweep at width 4, 3 blocks: {len(sweep)} rules, worst rate "
      f"{worst_rate} at block offsets {worst_rule.delta_blocks} "
      f"tag offset {worst_rule.delta_tag:#x}")
print("every rule stays at or under epsilon =",
      FamilyParams(tag_bits=4, max_blocks=3).epsilon)

print()
print("== response forgery ==")
forge = estimate_response_forge(P2, trials=1, strategy="consistent",
                                method="exhaustive")
blind = estimate_response_forge(P2, trials=1, strategy="blind",
                                method="exhaustive")
print(f"width 2 exhaustive, consistent guess: {forge.rate} "
      f"(= |T|/|K|, the price of revealing the key)")
print(f"width 2 exhaustive, blind guess:      {blind.rate} (= 1/|K|)")
mc = estimate_response_forge(P8, trials=10**6, rng_seed=13, strategy="consistent",
                             method="sampled")
print(f"width 8, 10^6 seeded trials: {mc.rate:.6f} +- {mc.stderr:.2e} "
      f"(analytic {float(mc.bound):.6f}) within band: {mc.passed}")
