"""Quick end-to-end check of the pysfqrm extension module."""

import pysfqrm

code = pysfqrm.RmCode(1, 3)
assert (code.n, code.k, code.d_min) == (8, 4, 4)
assert code.encode("1010") == "00110011"
assert code.decode("10110011") == ("1010", "corrected", [1])
assert code.decode("10110011", mode="detect_only")[1] == "detected_uncorrectable"
assert pysfqrm.encode_xor_oracle("1010") == "00110011"
assert code.error_pattern_census(3)[3] == (0, 896, 0)

net = pysfqrm.Netlist.reference()
assert len(net) == 53 and len(net.faultable_cells()) == 49
assert pysfqrm.Netlist.parse(net.serialize()).serialize() == net.serialize()
msgs = [format(v, "04b") for v in range(16)]
assert net.simulate(msgs) == [code.encode(m) for m in msgs]
faulty = net.simulate(["1010"], open_cells=["dff_c8_1", "dff_c8_2"])
assert faulty == ["00110010"]

rows = net.fault_tolerance_census(1)
assert len(rows) == 49

res = pysfqrm.run_experiment("rm13_after_ecc", realizations=50, messages=20, fault_prob=0.0)
assert res.cdf == [(0, 1.0)] and res.p_zero() == 1.0

results, violations = pysfqrm.compare_arms(realizations=200, messages=50, ppv=20, seed=1)
assert violations == 0
for name, r in sorted(results.items()):
    print(f"{name:16s} P(N_err=0) = {r.p_zero():.3f}")

try:
    code.encode("10x0")
except ValueError as e:
    print("rejected:", e)
else:
    raise AssertionError("malformed bits accepted")

print("smoke test ok")
