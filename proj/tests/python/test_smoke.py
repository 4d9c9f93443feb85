"""Smoke tests for the python bindings; run by ctest with PYTHONPATH set to
the build tree's python/ directory."""

import math
import os
import sys
import tempfile

import vain


def test_version():
    assert vain.__version__


def test_softmax():
    p = vain.softmax([0.0, 0.0])
    assert abs(p[0] - 0.5) < 1e-15 and abs(p[1] - 0.5) < 1e-15
    q = vain.softmax([1000.0, 0.0])
    assert math.isfinite(q[0]) and abs(q[0] - 1.0) < 1e-12


def test_perft():
    assert vain.perft(1) == 20
    assert vain.perft(2) == 400
    assert vain.perft(3) == 8902


def test_pgn_and_mpp():
    games, errors = vain.parse_pgn('[Event "t"]\n\n1. e4 {x} e5 2. Nf3 1-0\n')
    assert not errors
    assert games[0]["moves"] == ["e4", "e5", "Nf3"]
    examples = vain.extract_mpp(games[0]["moves"])
    assert len(examples) == 3
    assert examples[0]["label"] == 12  # the e2 pawn's slot
    assert all(len(ex["slots"]) == 32 for ex in examples)


def test_selfplay_replays():
    text = vain.selfplay_pgn(games=2, seed=11, max_plies=40)
    games, errors = vain.parse_pgn(text)
    assert not errors and len(games) == 2
    for g in games:
        assert vain.extract_mpp(g["moves"])


def test_balls_targets_are_replayable():
    records = vain.generate_balls(n_balls=4, traj=2, steps=5, seed=3)
    assert len(records) == 10
    again = vain.generate_balls(n_balls=4, traj=2, steps=5, seed=3)
    assert records == again  # determinism
    for rec in records:
        for b in rec["balls"]:
            assert math.isfinite(b["dx"]) and math.isfinite(b["dvx"])


def test_model_forward_and_attention():
    model = vain.make_model(arch="vain", feature_dim=4, out_dim=4, seed=5)
    feats = [[0.1, 0.2, 0.3, 0.4], [0.5, -0.2, 0.0, 0.1], [-0.3, 0.3, 0.2, -0.1]]
    out = model.forward(feats)
    assert len(out["per_agent"]) == 3
    w = out["attention"]
    for i in range(3):
        assert w[i][i] == 0.0
        for j in range(3):
            assert w[i][j] >= 0.0
        row = sum(w[i])
        assert 0.0 < row <= 1.0 + 1e-12
    assert model.comm_evals == 3

    counts = vain.count_encoder_evals(model.spec_json, 32)
    assert counts == (32, 0)
    in_model = vain.make_model(arch="in", feature_dim=4, out_dim=4, seed=5)
    assert vain.count_encoder_evals(in_model.spec_json, 32) == (0, 32 * 31)


def test_attention_pool_oracle():
    ecomm = [[1.0, 2.0], [3.0, -1.0]]
    attn = [[0.5], [0.5]]
    pooled, w = vain.attention_pool(ecomm, attn)
    assert w[0][1] == 0.5 and w[1][0] == 0.5
    assert pooled[0] == [1.5, -0.5]


def test_checkpoint_roundtrip():
    model = vain.make_model(arch="commnet", feature_dim=4, out_dim=2, seed=9)
    feats = [[0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1]]
    before = model.forward(feats)["per_agent"]
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "m.ckpt")
        model.save(path)
        loaded = vain.load_model(path)
        after = loaded.forward(feats)["per_agent"]
    assert before == after


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
