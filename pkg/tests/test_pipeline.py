"""End-to-end pipeline: toy corpus, training loops, sidecars, CLI, timing."""

import numpy as np
import pytest

from melsynth.audio_frontend import (
    DatasetError,
    load_dataset,
    load_wav,
    read_durations,
)
from melsynth.cli import main
from melsynth.pipeline import (
    MetricsLog,
    TOY_PHONES,
    bench_inputs,
    config_to_text,
    default_config,
    format_table,
    load_config,
    make_toy_corpus,
    phonemize,
    run_benchmark,
    run_extract_durations,
    run_student_training,
    run_synthesize,
    run_teacher_training,
    spread_durations,
    write_bench_csv,
    write_pgm,
    write_toy_config,
)
from melsynth.nn_core.kernels import active_backend, available_backends


def micro_cfg(root):
    # smallest architecture that still exercises every code path
    cfg = default_config()
    cfg.data.root = str(root)
    cfg.data.holdout = 1
    cfg.data.griffin_lim_iterations = 4
    cfg.audio.mel_bins = 20
    cfg.teacher.residual_channels = 8
    cfg.teacher.gate_channels = 16
    cfg.teacher.encoder_blocks = 2
    cfg.teacher.decoder_blocks = 2
    cfg.teacher.embedding_dim = 12
    cfg.teacher.attention_dim = 12
    cfg.teacher.epochs = 2
    cfg.student.channels = 16
    cfg.student.encoder_blocks = 2
    cfg.student.decoder_blocks = 2
    cfg.student.duration_blocks = 1
    cfg.student.epochs = 2
    cfg.training.batch_size = 2
    cfg.training.warmup_epochs = 1
    cfg.training.checkpoint_every = 1
    return cfg


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("toycorpus")
    make_toy_corpus(root, count=4, seed=3)
    return root


@pytest.fixture(scope="module")
def teacher_run(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("teacher")
    cfg = micro_cfg(corpus)
    return cfg, run_teacher_training(cfg, out, max_steps=2)


@pytest.fixture(scope="module")
def sidecar(corpus, teacher_run, tmp_path_factory):
    cfg, result = teacher_run
    out = tmp_path_factory.mktemp("durations") / "durations.csv"
    return run_extract_durations(cfg, out_path=out, model=result["model"])


@pytest.fixture(scope="module")
def student_run(corpus, sidecar, tmp_path_factory):
    out = tmp_path_factory.mktemp("student")
    cfg = micro_cfg(corpus)
    return cfg, run_student_training(cfg, out, durations_path=sidecar,
                                     max_steps=2)


class TestToyCorpus:
    def test_layout_and_symbols(self, corpus):
        assert (corpus / "wavs").is_dir()
        lines = (corpus / "metadata.csv").read_text().strip().split("\n")
        assert len(lines) == 4
        tones = {s for s, (kind, _) in TOY_PHONES.items() if kind == "tone"}
        for line in lines:
            utt_id, symbols = line.split("|")
            symbols = symbols.split()
            assert 7 <= len(symbols) <= 10
            assert set(symbols) <= set(TOY_PHONES)
            # utterances start and end on steady tones
            assert symbols[0] in tones and symbols[-1] in tones
            assert (corpus / "wavs" / f"{utt_id}.wav").exists()
        assert (corpus / "phonemes.csv").read_text() \
            == (corpus / "metadata.csv").read_text()

    def test_deterministic(self, tmp_path):
        a = make_toy_corpus(tmp_path / "a", count=3, seed=7)
        b = make_toy_corpus(tmp_path / "b", count=3, seed=7)
        assert (a / "metadata.csv").read_text() == (b / "metadata.csv").read_text()
        for wav in sorted((a / "wavs").iterdir()):
            assert wav.read_bytes() == (b / "wavs" / wav.name).read_bytes()

    def test_seed_changes_content(self, tmp_path):
        a = make_toy_corpus(tmp_path / "a", count=3, seed=1)
        b = make_toy_corpus(tmp_path / "b", count=3, seed=2)
        assert (a / "metadata.csv").read_text() != (b / "metadata.csv").read_text()

    def test_loadable_and_bounded(self, corpus):
        train, holdout = load_dataset(corpus, holdout=1)
        assert len(train) == 3 and len(holdout) == 1
        for u in train + holdout:
            assert len(u.waveform) <= int(2.0 * 22050)
            assert u.phoneme_ids.min() > 0  # no padding ids in real input

    def test_config_template_parses(self, corpus, tmp_path):
        path = write_toy_config(tmp_path, corpus_root=corpus)
        cfg = load_config(path)
        assert cfg.data.root == str(corpus)
        assert cfg.teacher.residual_channels < default_config().teacher.residual_channels


class TestArtifacts:
    def test_metrics_log(self, tmp_path):
        log = MetricsLog(tmp_path / "m.csv", ["step", "loss"])
        log.append(step=1, loss=0.25)
        log.append(step=2, loss=0.125)
        lines = (tmp_path / "m.csv").read_text().strip().split("\n")
        assert lines[0] == "step,loss"
        assert lines[1] == "1,0.25"
        assert len(lines) == 3

    def test_metrics_log_appends_across_reopen(self, tmp_path):
        MetricsLog(tmp_path / "m.csv", ["step"]).append(step=1)
        MetricsLog(tmp_path / "m.csv", ["step"]).append(step=2)
        lines = (tmp_path / "m.csv").read_text().strip().split("\n")
        assert lines == ["step", "1", "2"]

    def test_write_pgm(self, tmp_path):
        write_pgm(tmp_path / "a.pgm", np.array([[0.0, 0.5], [1.0, 0.25]]))
        raw = (tmp_path / "a.pgm").read_bytes()
        assert raw.startswith(b"P5\n2 2\n255\n")
        assert raw[len(b"P5\n2 2\n255\n"):] == bytes([0, 128, 255, 64])


class TestTeacherTraining:
    def test_artifacts_and_history(self, teacher_run):
        cfg, result = teacher_run
        assert result["checkpoint"].exists()
        assert [h["step"] for h in result["history"]] == [1, 2]
        assert all(np.isfinite(h["mae"]) and np.isfinite(h["guided"])
                   for h in result["history"])
        out = result["checkpoint"].parent
        metrics = (out / "teacher_metrics.csv").read_text().strip().split("\n")
        assert metrics[0] == "step,lr,mae,guided"
        assert len(metrics) == 3
        assert (out / "teacher_eval.csv").exists()
        assert (out / "attention" / "epoch0001.pgm").exists()
        for key in ("mae", "guided", "diagonality"):
            assert np.isfinite(result["final_eval"][key])

    def test_resume_continues_step_count(self, corpus, teacher_run, tmp_path):
        cfg, first = teacher_run
        resumed = run_teacher_training(cfg, tmp_path, max_steps=4,
                                       resume=first["checkpoint"])
        assert [h["step"] for h in resumed["history"]] == [3, 4]
        # warmup lr keeps rising across the resume boundary
        lrs = np.loadtxt(tmp_path / "teacher_metrics.csv", delimiter=",",
                         skiprows=1, usecols=1, ndmin=1)
        assert lrs[0] > first["history"][-1]["step"] * 0.0


class TestDurationExtraction:
    def test_sidecar_complete_and_consistent(self, corpus, sidecar):
        table = read_durations(sidecar)
        train, holdout = load_dataset(corpus, holdout=1)
        assert set(table) == {u.id for u in train + holdout}
        for u in train + holdout:
            d = table[u.id]
            assert len(d) == u.n_phonemes
            assert (d >= 0).all() and d.sum() > 0

    def test_rerun_is_byte_identical(self, corpus, teacher_run, sidecar,
                                     tmp_path):
        cfg, result = teacher_run
        again = run_extract_durations(cfg, out_path=tmp_path / "d.csv",
                                      model=result["model"])
        assert again.read_bytes() == sidecar.read_bytes()

    def test_missing_utterance_rejected(self, corpus, sidecar, tmp_path):
        lines = sidecar.read_text().strip().split("\n")
        crippled = tmp_path / "short.csv"
        crippled.write_text("\n".join(lines[:-1]) + "\n")
        cfg = micro_cfg(corpus)
        with pytest.raises(DatasetError, match="missing from durations"):
            run_student_training(cfg, tmp_path / "out",
                                 durations_path=crippled, max_steps=1)

    def test_length_mismatch_rejected(self, corpus, sidecar, tmp_path):
        lines = sidecar.read_text().strip().split("\n")
        utt_id, counts = lines[0].split("|")
        lines[0] = f"{utt_id}|{' '.join(counts.split()[:-1])}"
        crippled = tmp_path / "bad.csv"
        crippled.write_text("\n".join(lines) + "\n")
        cfg = micro_cfg(corpus)
        with pytest.raises(DatasetError, match="durations"):
            run_student_training(cfg, tmp_path / "out",
                                 durations_path=crippled, max_steps=1)


class TestStudentTrainingRun:
    def test_artifacts_and_history(self, student_run):
        cfg, result = student_run
        assert result["checkpoint"].exists()
        assert [h["step"] for h in result["history"]] == [1, 2]
        mean, std = result["stats"]
        assert np.isfinite(mean) and std > 0
        for key in ("mae", "ssim", "duration", "total"):
            assert np.isfinite(result["train_eval"][key])
        out = result["checkpoint"].parent
        assert (out / "student_metrics.csv").exists()
        assert (out / "student_eval.csv").exists()

    def test_resume_continues_step_count(self, corpus, sidecar, student_run,
                                         tmp_path):
        cfg, first = student_run
        resumed = run_student_training(cfg, tmp_path, durations_path=sidecar,
                                       max_steps=4, resume=first["checkpoint"])
        assert [h["step"] for h in resumed["history"]] == [3, 4]
        # stats ride the checkpoint (stored as float32)
        assert resumed["stats"] == pytest.approx(first["stats"], rel=1e-6)


@pytest.fixture(scope="module")
def voiced_student(student_run):
    # two training steps still predict ~zero durations; bias the duration
    # head so synthesis tests cover a real multi-frame waveform
    cfg, result = student_run
    result["model"].duration_out.bias.data[:] = np.log(9.0)
    return cfg, result


class TestSynthesis:
    def test_phoneme_passthrough(self):
        symbols, ids = phonemize(phonemes="AA IY T")
        assert symbols == ["AA", "IY", "T"]
        assert ids.shape == (3,) and (ids > 0).all()

    def test_text_goes_through_lexicon(self):
        symbols, ids = phonemize(text="the river")
        assert "DH" in symbols and "R" in symbols
        assert len(ids) == len(symbols)

    def test_unknown_symbol_rejected(self):
        with pytest.raises(DatasetError, match="unknown phoneme"):
            phonemize(phonemes="AA QQQ")

    def test_empty_input_rejected(self):
        with pytest.raises(DatasetError, match="no phonemes"):
            phonemize(text="   ")

    def test_wav_duration_matches_durations(self, voiced_student, tmp_path):
        cfg, result = voiced_student
        out = run_synthesize(cfg, None, tmp_path / "a.wav",
                             phonemes="AA IY UW EH OW AA",
                             model=result["model"], stats=result["stats"])
        wave = load_wav(out["path"], expected_rate=cfg.audio.sample_rate)
        assert len(out["durations"]) == 6
        assert out["frames"] == int(out["durations"].sum()) > 6
        # istft length is (frames-1)*hop + window, one window of slack
        assert abs(len(wave) - out["frames"] * cfg.audio.hop_length) \
            <= cfg.audio.win_length

    def test_synthesis_is_deterministic(self, voiced_student, tmp_path):
        cfg, result = voiced_student
        for name in ("a.wav", "b.wav"):
            run_synthesize(cfg, None, tmp_path / name, phonemes="AA M S AA",
                           model=result["model"], stats=result["stats"])
        assert (tmp_path / "a.wav").read_bytes() \
            == (tmp_path / "b.wav").read_bytes()

    def test_checkpoint_path_loads_stats(self, student_run, tmp_path):
        cfg, result = student_run
        out = run_synthesize(cfg, result["checkpoint"], tmp_path / "c.wav",
                             phonemes="AA IY AA")
        # untrained head may predict a degenerate 1-frame spectrogram;
        # the chain must still produce a valid (possibly empty) file
        assert out["path"].exists() and out["frames"] >= 1


class TestBenchmark:
    def test_spread_durations(self):
        d = spread_durations(838, 37)
        assert d.sum() == 838 and d.max() - d.min() <= 1

    def test_bench_inputs_shape(self):
        cfg = default_config()
        ids, durations, audio_seconds = bench_inputs(cfg)
        # 9.72 s at hop 256 / 22.05 kHz plus the leading frame
        assert durations.sum() == 1 + int(9.72 * 22050) // 256 == 838
        assert len(ids) == len(durations)
        assert audio_seconds == pytest.approx(838 * 256 / 22050)

    def test_rows_and_backend_restored(self, student_run, tmp_path):
        cfg, result = student_run
        before = active_backend()
        rows, audio_seconds = run_benchmark(
            result["model"], cfg, result["stats"], batch_sizes=(1, 2),
            repeats=1, vocode=False)
        assert active_backend() == before
        assert len(rows) == 2 * len(available_backends())
        for r in rows:
            assert r.sgram > 0 and r.audio < 1e-3 and r.rtf > 0
        table = format_table(rows, audio_seconds)
        assert "RTF" in table and "reference" in table
        csv_path = write_bench_csv(rows, tmp_path / "bench.csv")
        lines = csv_path.read_text().strip().split("\n")
        assert lines[0].startswith("backend,batch,")
        assert len(lines) == 1 + len(rows)


class TestCli:
    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_synthesize_needs_exactly_one_input(self, tmp_path, capsys):
        args = ["synthesize", "--checkpoint", "x.ckpt", "--out", "o.wav"]
        assert main(args) == 1
        assert main(args + ["--text", "a", "--phonemes", "AA"]) == 1

    def test_bad_batch_sizes(self, capsys):
        assert main(["benchmark", "--checkpoint", "x.ckpt",
                     "--batch-sizes", "1,zero"]) == 1
        assert main(["benchmark", "--checkpoint", "x.ckpt",
                     "--batch-sizes", "0"]) == 1

    def test_missing_config_file(self, corpus, tmp_path, capsys):
        assert main(["train-teacher", "--config", str(tmp_path / "no.cfg"),
                     "--out", str(tmp_path)]) == 2

    def test_missing_checkpoint_is_data_error(self, corpus, tmp_path, capsys):
        cfg_path = tmp_path / "c.cfg"
        cfg_path.write_text(config_to_text(micro_cfg(corpus)))
        assert main(["extract-durations", "--config", str(cfg_path),
                     "--checkpoint", str(tmp_path / "no.ckpt")]) == 2

    def test_full_chain(self, tmp_path, capsys):
        root = tmp_path / "corpus"
        assert main(["make-toy", "--out", str(root), "--count", "4",
                     "--seed", "3"]) == 0
        cfg_path = tmp_path / "micro.cfg"
        cfg_path.write_text(config_to_text(micro_cfg(root)))
        out = tmp_path / "run"
        assert main(["train-teacher", "--config", str(cfg_path),
                     "--out", str(out), "--max-steps", "2"]) == 0
        assert main(["extract-durations", "--config", str(cfg_path),
                     "--checkpoint", str(out / "teacher.ckpt"),
                     "--out", str(out / "durations.csv")]) == 0
        assert main(["train-student", "--config", str(cfg_path),
                     "--out", str(out), "--max-steps", "2",
                     "--durations", str(out / "durations.csv")]) == 0
        assert main(["synthesize", "--config", str(cfg_path),
                     "--checkpoint", str(out / "student.ckpt"),
                     "--out", str(out / "utt.wav"),
                     "--phonemes", "AA IY UW"]) == 0
        assert main(["benchmark", "--config", str(cfg_path),
                     "--checkpoint", str(out / "student.ckpt"),
                     "--batch-sizes", "1", "--repeats", "1", "--no-vocode",
                     "--out", str(out / "bench.csv")]) == 0
        assert (out / "utt.wav").exists() and (out / "bench.csv").exists()
        assert "RTF" in capsys.readouterr().out
