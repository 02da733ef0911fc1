"""Командная строка: cluster, smooth, score, compare, stats и скрытая fixtures"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import pandas as pd
import soundfile as sf

from .acoustics import read_audio
from .config import METHODS, load_config_file, run_config_from_mapping
from .corpus_stats import (CI_METHODS, OVP_BASES, STM_MODES, RecordingFeatures, features_frame,
                           recording_features, summarize, summary_frame)
from .embeddings import read_embeddings, serialize_embeddings
from .errors import DiarlabError, ValidationError
from .fixtures import AudioSpec, FixtureSpec, embeddings_reference, gen_audio, gen_embeddings, gen_timeline
from .log import setup_logging
from .pipeline import diarize
from .plots import plot_delta, plot_feature_summary, save_figure
from .rttm import Timeline, read_rttm, serialize_rttm
from .scoring import (DerBreakdown, ScoringConfig, aggregate, delta_report, pair_up, relative_improvement,
                      report_frame, score_pair)
from .smoothing import DEFAULT_HOP, smooth_timeline

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"
PUBLIC_COMMANDS = "{cluster,smooth,score,compare,stats}"

# значения по умолчанию применяются после слияния с файлом настроек
DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "jobs": 1,
    "window": 11,
    "hop": DEFAULT_HOP,
    "collar": 0.0,
    "no_overlap": False,
    "per_file": "on",
    "ci": "normal",
    "stm_mode": "changes",
    "ovp_base": "file",
    "exclude": "",
}

T = TypeVar("T")


def _speakers(value: str):
    if value == "auto":
        return value
    try:
        count = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидалось целое число или auto: {value}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("число дикторов должно быть положительным")
    return count


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="зерно генератора (по умолчанию 0)")
    common.add_argument("--jobs", type=int, default=None, help="число параллельных записей")
    common.add_argument("--config", type=Path, default=None, help="YAML с параметрами; флаги важнее файла")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v: INFO, -vv: DEBUG")

    parser = argparse.ArgumentParser(prog="diarlab", description="Кластеризация, сглаживание и оценка диаризации")
    sub = parser.add_subparsers(dest="command", required=True, metavar=PUBLIC_COMMANDS)

    p = sub.add_parser("cluster", parents=[common], help="эмбеддинги CSV → гипотеза RTTM")
    p.add_argument("embeddings", type=Path)
    p.add_argument("-o", "--output", type=Path, default=None, help="файл RTTM (по умолчанию stdout)")
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--k", type=int, default=None, help="соседей в графе (sc-fixed, sc-mk)")
    p.add_argument("--p", type=float, default=None, help="доля соседей (sc-adapt)")
    p.add_argument("--tau", type=float, default=None, help="доля группы «тот же диктор» (sc-pna)")
    p.add_argument("--min-keep", type=int, default=None)
    p.add_argument("--linkage", choices=("average", "complete", "single"), default=None)
    p.add_argument("--threshold", type=float, default=None, help="порог косинусного расстояния (ahc)")
    p.add_argument("--target-k", type=int, default=None)
    p.add_argument("--kernels", type=str, default=None, help="ядра через запятую (sc-mk)")
    p.add_argument("--kernel-weights", type=str, default=None, help="веса ядер через запятую (sc-mk)")
    p.add_argument("--num-speakers", type=_speakers, default=None, help="число дикторов или auto")
    p.add_argument("--max-speakers", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None, help="перезапуски k-means")
    p.add_argument("--symmetrize", choices=("max", "min"), default=None)
    p.add_argument("--smooth-window", type=int, default=None)
    p.add_argument("--hop", type=float, default=None)

    p = sub.add_parser("smooth", parents=[common], help="медианное сглаживание RTTM")
    p.add_argument("rttm", type=Path)
    p.add_argument("-o", "--output", type=Path, default=None)
    p.add_argument("--window", type=int, default=None, help="нечётное окно в кадрах (11 или 29)")
    p.add_argument("--hop", type=float, default=None)

    for name, help_text in (("score", "DER гипотезы относительно эталона"),
                            ("compare", "ΔDER двух систем по файлам")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "compare":
            p.add_argument("hyp_a", type=Path)
            p.add_argument("hyp_b", type=Path)
            p.add_argument("ref", type=Path)
            p.add_argument("--exclude", type=str, default=None, help="идентификаторы записей через запятую")
            p.add_argument("--plot", type=Path, default=None, help="PNG с графиком ΔDER")
        else:
            p.add_argument("ref", type=Path)
            p.add_argument("hyp", type=Path)
            p.add_argument("--per-file", choices=("on", "off"), default=None)
        p.add_argument("-o", "--output", type=Path, default=None)
        p.add_argument("--collar", type=float, default=None)
        p.add_argument("--no-overlap", action="store_true", default=None, help="не оценивать участки наложений")

    p = sub.add_parser("stats", parents=[common], help="признаки записей корпуса и их средние")
    p.add_argument("rttm", type=Path)
    p.add_argument("--audio-dir", type=Path, default=None, help="каталог <recording_id>.wav")
    p.add_argument("-o", "--output", type=Path, default=None, help="CSV признаков (по умолчанию stdout)")
    p.add_argument("--summary", type=Path, default=None, help="CSV сводки (по умолчанию stdout после признаков)")
    p.add_argument("--plot", type=Path, default=None)
    p.add_argument("--ci", choices=CI_METHODS, default=None)
    p.add_argument("--stm-mode", choices=STM_MODES, default=None)
    p.add_argument("--ovp-base", choices=OVP_BASES, default=None)

    p = sub.add_parser("fixtures", parents=[common])
    p.add_argument("out_dir", type=Path)
    p.add_argument("--duration", type=float, default=None)

    return parser


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Флаги > файл настроек > значения по умолчанию"""
    values = vars(args)
    if args.config is not None:
        try:
            file_values = load_config_file(args.config)
        except (OSError, DiarlabError) as e:
            parser.error(f"не удалось прочитать {args.config}: {e}")
        for key, value in file_values.items():
            if key not in values or key in ("command", "config", "verbose"):
                parser.error(f"{args.config}: неизвестный параметр {key}")
            if values[key] is None:
                values[key] = value
    for key, value in DEFAULTS.items():
        if key in values and values[key] is None:
            values[key] = value
    return argparse.Namespace(**values)


def _parallel_map(fn: Callable[[str], T], ids: Iterable[str], jobs: int) -> List[T]:
    """Результаты в порядке отсортированных идентификаторов независимо от порядка завершения"""
    ids = sorted(ids)
    if jobs <= 1:
        return [fn(rec) for rec in ids]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, ids))


def _emit(data: bytes, path: Optional[Path]) -> None:
    if path is None or str(path) == "-":
        sys.stdout.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        path.write_bytes(data)


def _csv(frame: pd.DataFrame) -> bytes:
    return frame.to_csv(index=False, lineterminator="\n", float_format=FLOAT_FORMAT).encode("utf-8")


def _read_timelines(path: Path, what: str) -> Dict[str, Timeline]:
    if not path.exists():
        raise ValidationError(f"{what}: {path} не существует")
    return read_rttm(path)


# --- Подкоманды ---
def cmd_cluster(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    keys = ("method", "k", "p", "tau", "min_keep", "linkage", "threshold", "target_k", "kernels",
            "kernel_weights", "num_speakers", "max_speakers", "restarts", "seed", "symmetrize",
            "smooth_window", "hop")
    try:
        cfg = run_config_from_mapping({key: getattr(args, key) for key in keys})
    except (ValueError, TypeError) as e:
        parser.error(str(e))
    sets = read_embeddings(args.embeddings)
    timelines = _parallel_map(lambda rec: diarize(sets[rec], cfg), sets, args.jobs)
    _emit(serialize_rttm(timelines), args.output)
    return 0


def cmd_smooth(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.window < 1 or args.window % 2 == 0:
        parser.error(f"окно должно быть нечётным и ≥ 1: {args.window}")
    timelines = _read_timelines(args.rttm, "RTTM")
    smoothed = _parallel_map(lambda rec: smooth_timeline(timelines[rec], args.window, args.hop), timelines, args.jobs)
    _emit(serialize_rttm(smoothed), args.output)
    return 0


def _scoring_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ScoringConfig:
    try:
        return ScoringConfig(collar=args.collar, score_overlap=not args.no_overlap)
    except ValidationError as e:
        parser.error(str(e))


def _score_all(refs: Dict[str, Timeline], hyps: Dict[str, Timeline], cfg: ScoringConfig,
               jobs: int) -> List[DerBreakdown]:
    pairs = {ref.recording_id: (ref, hyp) for ref, hyp in pair_up(refs, hyps)}
    return _parallel_map(lambda rec: score_pair(pairs[rec][0], pairs[rec][1], cfg), pairs, jobs)


def cmd_score(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _scoring_config(args, parser)
    refs = _read_timelines(args.ref, "эталон")
    if args.hyp.exists():
        hyps = read_rttm(args.hyp)
    else:
        logger.warning("Гипотеза %s не найдена", args.hyp)
        hyps = {}
    per_file = _score_all(refs, hyps, cfg, args.jobs)
    if not per_file:
        raise ValidationError(f"эталон {args.ref} не содержит реплик")
    total = aggregate(per_file)
    logger.info("Итоговый DER: %.4f", total.der)
    _emit(_csv(report_frame(per_file, total, per_file_rows=args.per_file == "on")), args.output)
    return 0


def cmd_compare(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _scoring_config(args, parser)
    exclude = {rec.strip() for rec in args.exclude.split(",") if rec.strip()}
    refs = {rec: t for rec, t in _read_timelines(args.ref, "эталон").items() if rec not in exclude}
    hyps_a = _read_timelines(args.hyp_a, "гипотеза a")
    hyps_b = _read_timelines(args.hyp_b, "гипотеза b")
    missing = {name: sorted(set(refs) - set(hyps)) for name, hyps in (("a", hyps_a), ("b", hyps_b))}
    if missing["a"] or missing["b"]:
        raise ValidationError(f"гипотезы покрывают не все записи: нет в a {missing['a']}, нет в b {missing['b']}")

    per_a = _score_all(refs, hyps_a, cfg, args.jobs)
    per_b = _score_all(refs, hyps_b, cfg, args.jobs)
    table = delta_report(per_a, per_b, exclude)
    total_a, total_b = aggregate(per_a), aggregate(per_b)
    if total_a.der > 0:
        logger.info("DER a %.4f, b %.4f, относительное улучшение b: %.2f%%", total_a.der, total_b.der,
                    100 * relative_improvement(total_a.der, total_b.der))
    if args.plot is not None:
        save_figure(plot_delta(table), args.plot)
    _emit(_csv(table), args.output)
    return 0


def _load_audio(audio_dir: Optional[Path], recording_id: str):
    if audio_dir is None:
        return None
    path = audio_dir / f"{recording_id}.wav"
    if not path.exists():
        logger.warning("%s: нет файла %s, акустические признаки не считаются", recording_id, path)
        return None
    try:
        return read_audio(path)
    except (RuntimeError, OSError) as e:
        logger.warning("%s: не удалось прочитать %s (%s), акустические признаки не считаются", recording_id, path, e)
        return None


def cmd_stats(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    timelines = _read_timelines(args.rttm, "RTTM")
    if not timelines:
        raise ValidationError(f"{args.rttm}: нет ни одной записи")

    def features(rec: str) -> RecordingFeatures:
        timeline = timelines[rec]
        audio = _load_audio(args.audio_dir, rec)
        duration = timeline.extent
        if audio is not None:
            audio_duration = len(audio[0]) / audio[1]
            if audio_duration + 5e-4 < duration:
                logger.warning("%s: звук короче разметки, длительность берётся по разметке", rec)
            else:
                duration = audio_duration
        return recording_features(rec, timeline, duration, audio, args.stm_mode, args.ovp_base)

    rows = _parallel_map(features, timelines, args.jobs)
    summary = summarize(rows, args.ci)
    features_csv = _csv(features_frame(rows))
    summary_csv = _csv(summary_frame(summary))
    if args.summary is None and args.output is None:
        _emit(features_csv + b"\n" + summary_csv, None)
    else:
        _emit(features_csv, args.output)
        _emit(summary_csv, args.summary)
    if args.plot is not None:
        save_figure(plot_feature_summary(summary), args.plot)
    return 0


def cmd_fixtures(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    """Синтетические данные для тестов и демонстраций"""
    args.out_dir.mkdir(parents=True, exist_ok=True)
    spec = FixtureSpec(seed=args.seed, duration=args.duration or FixtureSpec.duration)
    embeddings, labels = gen_embeddings(spec)
    (args.out_dir / "embeddings.csv").write_bytes(serialize_embeddings([embeddings]))
    (args.out_dir / "reference.rttm").write_bytes(serialize_rttm([embeddings_reference(embeddings, labels)]))

    conversation = replace(spec, recording_id="conversation")
    timeline = gen_timeline(conversation)
    audio = AudioSpec()
    samples = gen_audio(audio, timeline, conversation.duration, conversation.seed)
    (args.out_dir / "conversation.rttm").write_bytes(serialize_rttm([timeline]))
    sf.write(str(args.out_dir / "conversation.wav"), samples, audio.rate, subtype="FLOAT")
    logger.info("Синтетические данные записаны в %s", args.out_dir)
    return 0


COMMANDS = {
    "cluster": cmd_cluster,
    "smooth": cmd_smooth,
    "score": cmd_score,
    "compare": cmd_compare,
    "stats": cmd_stats,
    "fixtures": cmd_fixtures,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    args = _merge_config(args, parser)
    try:
        return COMMANDS[args.command](args, parser)
    except (DiarlabError, OSError) as e:
        logger.error("%s", e)
        return 1
