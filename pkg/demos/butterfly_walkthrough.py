"""
Sending two qubits across the butterfly
=======================================

Both sources want to send a qubit to the opposite corner, but the middle
edge (n1, n2) can carry only one register. We simulate the XOR scheme
quantumly and watch the intermediate registers disappear one node at a time.
"""

import numpy as np

from qnetcode import instances, protocol

net, scheme = instances.butterfly(2)
print("edges:", ", ".join(f"R{e.index}={e}" for e in net.edges))
print("part 2 order:", net.reverse_topological_internal())

# an arbitrary two-qubit input
alpha = protocol.random_input(2, 2, np.random.default_rng(1))
print("input amplitudes:", np.round(alpha, 4))


def show(label, state):
    if label.endswith("measured") or label.endswith("done") or label == "part3:final":
        print(f"\n-- {label}  [{' '.join(map(str, state.registers))}]")
        print(state.dump())


run = protocol.ProtocolRun(net, scheme, input_amps=alpha, seed=7, observer=show)
report = protocol.run_full(run)

###############################################################################
# The report lists every symbol that crossed an edge. Part 2 sends one
# symbol back along each internal edge, Part 3 re-runs the classical scheme
# on the source outcomes.

print()
print(report.to_text())
