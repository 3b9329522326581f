"""
Nonlinear coding schemes work too
=================================

Relabel the symbols on every internal edge by a random bijection. The
resulting scheme is still a classical solution but no longer linear, and
the quantum protocol carries the state across just as well. Larger
alphabets and random instances behave the same way.
"""

import numpy as np

from qnetcode import coding, instances, protocol

rng = np.random.default_rng(3)

for d in (2, 3):
    net, scheme = instances.butterfly(d)
    wrapped = coding.compose_with_edge_bijections(scheme, net, coding.random_permutations(net, d, rng))
    ok, _ = coding.verify_solution(wrapped, net)
    fids = []
    for seed in range(5):
        rep, _ = protocol.transmit(net, wrapped, protocol.random_input(d, 2, rng), seed=seed)
        fids.append(rep.fidelity)
    print(f"butterfly d={d}: solution={ok} linear={coding.is_linear(wrapped, net)} "
          f"min fidelity {min(fids):.12f}")

###############################################################################
# Random instances: chains scrambled by bijections plus mixer nodes that
# compute junk the chain nodes ignore.

for trial in range(5):
    net, scheme = instances.random_instance(rng, d=2, k=2, extra_nodes=2, extra_edges=2)
    rep, _ = protocol.transmit(net, scheme, protocol.random_input(2, 2, rng), seed=trial)
    print(f"random instance {trial}: |E|={len(net.edges)} internal={len(net.internal_edges)} "
          f"fidelity {rep.fidelity:.12f} bits {rep.classical_bits}/{rep.bound_bits}")
