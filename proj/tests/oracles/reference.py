"""Independent reference computations whose outputs are frozen in oracle_test.cpp.

Run with `python3 tests/oracles/reference.py`; it uses only the standard library.
"""
import math

# 2 -> 2 (tanh) -> 1 (linear); weights drawn by the library at seed 7, biases set by hand.
W1 = [[0.62311419323720463, 1.1005586879056755],
      [-0.9371397943412757, 0.95998730641878161]]
B1 = [0.1, -0.2]
W2 = [[-1.0146372410522089, -1.2583865784726014]]
B2 = [0.05]


def forward(x):
    h = [math.tanh(sum(W1[i][j] * x[j] for j in range(2)) + B1[i]) for i in range(2)]
    return [sum(W2[0][j] * h[j] for j in range(2)) + B2[0]]


def adam(theta, grads, lr, b1=0.9, b2=0.999, eps=1e-8):
    m = v = 0.0
    out = []
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta -= lr * (m / (1 - b1 ** t)) / (math.sqrt(v / (1 - b2 ** t)) + eps)
        out.append(theta)
    return out


def infonce_two(cos_cross, beta):
    # Both directions of a 2x2 batch with unit self-similarity.
    return math.log(1 + math.exp((cos_cross - 1) / beta))


FROZEN = {
    "forward": 1.636755239147744,
    "adam": [0.40000000099999999, 0.30000000200000065, 0.20000000300000068],
    "infonce_two": 2.0611536900435727e-09,
    "veltrack_fixed_point": 3.0,
}


def check():
    close = lambda a, b: abs(a - b) <= 1e-15 * max(1.0, abs(b))
    ok = close(forward([1.0, -1.0])[0], FROZEN["forward"])
    ok &= all(close(a, b) for a, b in zip(adam(0.5, [1.0] * 3, 0.1), FROZEN["adam"]))
    ok &= close(infonce_two(-1.0, 0.1), FROZEN["infonce_two"])
    ok &= close(0.15 / (1 - 0.95), FROZEN["veltrack_fixed_point"])
    return ok


if __name__ == "__main__":
    import sys
    if "--check" in sys.argv:
        sys.exit(0 if check() else 1)
    print("forward(1, -1) = %.17g" % forward([1.0, -1.0])[0])
    print("adam 3 steps from 0.5, g=1, lr=0.1:", ["%.17g" % x for x in adam(0.5, [1.0, 1.0, 1.0], 0.1)])
    print("B=2 cos -1 beta 0.1: %.17g" % infonce_two(-1.0, 0.1))
    print("veltrack fixed point: %.17g" % (0.15 / (1 - 0.95)))
