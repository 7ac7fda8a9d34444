"""A spiking neuron built from min, max and less-than.

The response profile is split into unit up and down steps; a sorting
network orders the step times and the threshold picks the first crossing.
"""
import warnings

from spacetime import INF, evaluate
from spacetime.tnn import (PAD, NeuronSpec, build_gated_neuron, build_neuron, build_sorter,
                           build_wta, evaluate_neuron, gated_binding, load_profile, neuron_oracle,
                           steps_of)
from spacetime.verify import Horizon, check_spacetime


def main():
    profile = load_profile("biexponential")
    print("response at weight 5:", profile.table[5].tolist())
    print("step lists:", steps_of(profile, 5))

    sorter = build_sorter(4)
    spikes = [3, 1, INF, 0]
    print("\nsorter(4)", spikes, "->", evaluate(sorter, dict(zip(sorter.inputs, spikes))))

    for theta in (4, 5):
        spec = NeuronSpec((5,), profile, theta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            net = build_neuron(spec)
        for x in (0, 3):
            print(f"theta={theta} spike at {x}: network {evaluate_neuron(net, [x])},"
                  f" oracle {neuron_oracle([x], spec)}")

    spec = NeuronSpec((4, 2), profile, 5)
    net = build_neuron(spec)
    print("\ntwo inputs, weights (4, 2), theta 5")
    for xs in ([0, 0], [0, 2], [2, 0], [0, INF]):
        print(f"  spikes {xs}: {evaluate_neuron(net, xs)} (oracle {neuron_oracle(xs, spec)})")
    print("  space-time function on D(5):", check_spacetime(net, Horizon(T=5), fixed={PAD: INF}).passed)

    # weights as configuration inputs: one gate per response component
    gated = build_gated_neuron(profile, 2, 5)
    fixed = gated_binding((4, 2), profile.W)
    print("  gated version agrees:",
          all(evaluate_neuron(gated, xs, fixed) == evaluate_neuron(net, xs)
              for xs in ([0, 0], [0, 2], [2, 0], [0, INF])))

    wta = build_wta(4)
    volley = [2, 4, 2, 7]
    print("\nwinner-take-all", volley, "->", evaluate(wta, dict(zip(wta.inputs, volley))))


if __name__ == "__main__":
    main()
