import json

import pytest

from rldas.agent import PpoAgent
from rldas.bench import load_instance_set
from rldas.cli import main


def test_bench_gen(tmp_path, capsys):
    out = tmp_path / "s.rset"
    assert main(["bench", "gen", "--class", "C2", "--dim", "10", "--count", "8", "--seed", "1",
                 "--folds", "4", "--out", str(out)]) == 0
    iset = load_instance_set(out)
    assert len(iset) == 8 and iset.k_folds == 4
    assert "wrote 8" in capsys.readouterr().out


def test_de_run(capsys):
    main(["de", "run", "--alg", "madde", "--class", "C1", "--dim", "10", "--maxfes", "10000", "--seed", "0"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "fe_used,best_cost" and len(lines) > 2


def test_features_dump(capsys):
    main(["features", "dump", "--class", "C2", "--dim", "10", "--seed", "3"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "feature,value" and len(lines) == 10


def test_stats(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("\n".join(str(x) for x in range(10)))
    (tmp_path / "b.txt").write_text("\n".join(str(x + 100) for x in range(10)))
    main(["stats", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt")])
    res = json.loads(capsys.readouterr().out)
    assert res["verdict"] == "+" and res["p_value"] < 1e-3


def test_eval_and_episode(tmp_path, capsys):
    ck = PpoAgent(10, seed=0).save(tmp_path / "a.ckpt")
    main(["bench", "gen", "--class", "C2", "--count", "2", "--folds", "1", "--out", str(tmp_path / "t.rset")])
    capsys.readouterr()
    main(["eval", "--checkpoint", str(ck), "--set", str(tmp_path / "t.rset"), "--runs", "5",
          "--maxfes", "10000", "--delta", "1000", "--out", str(tmp_path / "ev")])
    out = capsys.readouterr().out
    assert out.startswith("method,class") and (tmp_path / "ev" / "manifest.json").exists()
    main(["episode", "--class", "C1", "--seed", "2", "--checkpoint", str(ck)])
    assert capsys.readouterr().out.startswith("step,action,adc,fe_used,best_cost")


def test_train_cli(tmp_path, capsys):
    cfg = {"name": "tiny", "max_fes": 10000, "delta": 1000, "epochs": 1, "batch_size": 4, "n_train": 4,
           "n_val": 0, "n_test": 4, "out_dir": str(tmp_path / "r")}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    main(["train", "--config", str(tmp_path / "c.json")])
    assert (tmp_path / "r" / "checkpoints" / "epoch_0001.ckpt").exists()
    assert "trained 1 epochs" in capsys.readouterr().out


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["nope"])
