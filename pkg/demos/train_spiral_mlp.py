"""Regenerate the golden two-layer MLP used by the QoR check.

Trains 2 -> 16 (tanh) -> 2 (softmax) on a two-arm spiral with plain
full-batch gradient descent in float64, then writes weights, the held-out
test set, and the float64 reference accuracy to tests/data/spiral_mlp.json.
Everything is seeded; rerunning reproduces the file byte for byte.

Usage: python demos/train_spiral_mlp.py [--out PATH]
"""

import argparse
import json
import pathlib

import numpy as np

HIDDEN = 16
EPOCHS = 6000
LR = 1.0
WEIGHT_DECAY = 1e-4


def spiral(n_per_class: int, rng: np.random.Generator, noise: float = 0.06):
    """Two interleaved spiral arms inside the unit disc, labels 0/1."""
    t = np.linspace(0.25, 1.0, n_per_class)
    theta = t * 3.0 * np.pi
    pts, labels = [], []
    for cls in (0, 1):
        a = theta + cls * np.pi + rng.normal(0.0, noise, n_per_class)
        r = t * 0.95
        pts.append(np.stack([r * np.cos(a), r * np.sin(a)], axis=1))
        labels.append(np.full(n_per_class, cls))
    x = np.concatenate(pts)
    y = np.concatenate(labels)
    order = rng.permutation(len(y))
    return x[order], y[order]


def forward(x, w1, b1, w2, b2):
    h = np.tanh(x @ w1.T + b1)
    logits = h @ w2.T + b2
    e = np.exp(logits - logits.max(axis=1, keepdims=True))
    return h, e / e.sum(axis=1, keepdims=True)


def train(seed: int = 2026):
    rng = np.random.default_rng(seed)
    x_train, y_train = spiral(500, rng)
    x_test, y_test = spiral(250, rng)
    w1 = rng.normal(0.0, 0.7, (HIDDEN, 2))
    b1 = np.zeros(HIDDEN)
    w2 = rng.normal(0.0, 0.7, (2, HIDDEN))
    b2 = np.zeros(2)
    onehot = np.eye(2)[y_train]
    n = len(y_train)
    for epoch in range(EPOCHS):
        h, p = forward(x_train, w1, b1, w2, b2)
        g_logits = (p - onehot) / n
        g_w2 = g_logits.T @ h + WEIGHT_DECAY * w2
        g_b2 = g_logits.sum(axis=0)
        g_h = g_logits @ w2 * (1.0 - h * h)
        g_w1 = g_h.T @ x_train + WEIGHT_DECAY * w1
        g_b1 = g_h.sum(axis=0)
        w1 -= LR * g_w1
        b1 -= LR * g_b1
        w2 -= LR * g_w2
        b2 -= LR * g_b2
        if (epoch + 1) % 1000 == 0:
            _, p_t = forward(x_test, w1, b1, w2, b2)
            acc = float((p_t.argmax(axis=1) == y_test).mean())
            loss = float(-(onehot * np.log(p + 1e-12)).sum() / n)
            print(f"epoch {epoch + 1:5d}  loss {loss:.4f}  test acc {acc:.4f}")
    _, p_t = forward(x_test, w1, b1, w2, b2)
    ref_acc = float((p_t.argmax(axis=1) == y_test).mean())
    return {
        "seed": seed,
        "hidden": HIDDEN,
        "w1": w1.tolist(),
        "b1": b1.tolist(),
        "w2": w2.tolist(),
        "b2": b2.tolist(),
        "x_test": x_test.tolist(),
        "y_test": y_test.tolist(),
        "float64_accuracy": ref_acc,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    default_out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "spiral_mlp.json"
    ap.add_argument("--out", default=str(default_out))
    args = ap.parse_args()
    model = train()
    print(f"float64 reference accuracy: {model['float64_accuracy']:.4f}")
    wmax = max(np.abs(model[k]).max() for k in ("w1", "b1", "w2", "b2"))
    print(f"largest |weight|: {wmax:.3f} (I/O format ceiling 7.9998)")
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(model, fh)
        fh.write("\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
