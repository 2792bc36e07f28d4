"""Command-line surface for the whole pipeline.

Subcommands: gen-corpus, train, oneshot, classify, variants, blend, states.
Every subcommand is deterministic given its flags and seed, prints a final
machine-readable `key=value` summary line, and accepts `--config FILE` with
`key = value` lines (command-line flags win). Exit codes: 0 success,
1 usage error, 2 IO/data error.
"""

import argparse
import sys

import numpy as np

from . import analysis, oneshot
from .corpus import (DEFAULT_JITTER_SIGMA, DEFAULT_VARIANTS_PER_CHAR,
                     CorpusFormatError, TRAINED_LABELS, char_to_label,
                     generate_corpus, label_to_char, load_corpus,
                     load_templates, save_corpus)
from .network import init_params, load_checkpoint, one_hot, save_checkpoint
from .oneshot import (DEFAULT_NOISE_SIGMA, AcquisitionManifest,
                      ClassInferConfig, OneShotConfig, acquire_all, blend,
                      compare_priors, generate, generate_variants,
                      infer_class, load_manifest, one_shot_acquire,
                      save_manifest)
from .templates import default_templates
from .training import TrainConfig, save_loss_history, train

TARGET_COLOR = "#2ca02c"     # role: the presented example
PRE_COLOR = "#d62728"        # role: generation before inference
POST_COLOR = "#1f77b4"       # role: generation after inference


class DataError(Exception):
    """IO or data-content failure: exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _label_arg(text):
    try:
        if len(text) == 1 and text.isalpha():
            return char_to_label(text.lower())
        label = int(text)
        if not 0 <= label <= 25:
            raise ValueError
        return label
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad label {text!r}: expected a-z or 0-25") from None


def _summary(cmd, **kv):
    pairs = " ".join(f"{k}={v}" for k, v in kv.items())
    print(f"cmd={cmd} {pairs}")


def _manifest_path(model_path):
    return f"{model_path}.manifest.json"


def _load_model(path):
    try:
        return load_checkpoint(path)
    except FileNotFoundError:
        raise DataError(f"model checkpoint not found: {path}") from None
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _load_manifest_if_any(model_path):
    try:
        return load_manifest(_manifest_path(model_path))
    except FileNotFoundError:
        return AcquisitionManifest()


def _generation_length(args_length, manifest, labels):
    """Spec default: the rounded mean length of the relevant acquired
    samples; an explicit --length always wins."""
    if args_length:
        return args_length
    lengths = []
    for label in labels:
        try:
            lengths.append(manifest.length_of(label))
        except KeyError:
            raise DataError(
                f"label {label_to_char(label)!r} is not in the manifest; "
                "pass --length") from None
    return int(round(float(np.mean(lengths))))


def _templates(path):
    if path:
        return load_templates(path)
    return default_templates()


# -----------------------------------------------------------------
# subcommands
# -----------------------------------------------------------------

def cmd_gen_corpus(args):
    templates = _templates(args.templates)
    built = generate_corpus(templates, args.variants, args.jitter,
                            args.seed)
    save_corpus(built, args.out)
    counts = {}
    for s in built.samples:
        counts[s.label] = counts.get(s.label, 0) + 1
    print(" ".join(f"{label_to_char(l)}:{counts[l]}" for l in sorted(counts)))
    _summary("gen-corpus", samples=len(built), labels=len(counts),
             jitter=args.jitter, seed=args.seed, path=args.out)


def cmd_train(args):
    data = load_corpus(args.corpus).filter(TRAINED_LABELS)
    if not data.samples:
        raise DataError(f"{args.corpus}: no samples with trained labels")
    config = TrainConfig(learning_rate=args.lr, steps=args.steps,
                         seed=args.seed)
    snapshot_fn = None
    if args.checkpoint_every:
        def snapshot_fn(step, params):
            save_checkpoint(params, f"{args.model_out}.step{step}")
    params, losses = train(data, config, n_ff=args.n_ff,
                           n_lstm=args.n_lstm,
                           snapshot_every=args.checkpoint_every,
                           snapshot_fn=snapshot_fn)
    save_checkpoint(params, args.model_out)
    loss_out = args.loss_out or f"{args.model_out}.loss.txt"
    save_loss_history(losses, loss_out)
    final = float(losses[-100:].mean()) if len(losses) else float("nan")
    _summary("train", steps=args.steps, samples=len(data), seed=args.seed,
             n_ff=args.n_ff, n_lstm=args.n_lstm, final_loss=f"{final:.6g}",
             checkpoint=args.model_out, loss_log=loss_out)


def _select_sample(corpus_path, label, index):
    data = load_corpus(corpus_path)
    matching = data.by_label(label)
    if not matching:
        raise DataError(f"{corpus_path}: no sample with label "
                        f"{label_to_char(label)!r}")
    if not 0 <= index < len(matching):
        raise DataError(f"{corpus_path}: sample index {index} out of range "
                        f"(label {label_to_char(label)!r} has "
                        f"{len(matching)} samples)")
    return matching[index]


def cmd_oneshot(args):
    params = _load_model(args.model_in)
    sample = _select_sample(args.corpus, args.label, args.index)
    config = OneShotConfig(iterations=args.iterations,
                           learning_rate=args.lr)
    pre = generate(params, sample.label, len(sample.points))
    acquired, losses = one_shot_acquire(params, sample, config,
                                        adapt_bias=not args.no_bias,
                                        use_adam=not args.sgd)
    post = generate(acquired, sample.label, len(sample.points))
    save_checkpoint(acquired, args.model_out)
    manifest = _load_manifest_if_any(args.model_in)
    manifest.entries = [e for e in manifest.entries
                        if e.label != sample.label]
    manifest.entries.append(oneshot.AcquiredLabel(
        label=sample.label, length=len(sample.points),
        final_loss=float(losses[-1])))
    manifest.entries.sort(key=lambda e: e.label)
    save_manifest(manifest, _manifest_path(args.model_out))
    if args.svg_out:
        analysis.render_traces(
            [(np.asarray(sample.points), TARGET_COLOR, "target"),
             (pre, PRE_COLOR, "pre-inference"),
             (post, POST_COLOR, "post-inference")], args.svg_out)
    extra = {}
    if args.untrained_control:
        control = init_params(params.n_ff, params.n_lstm,
                              args.control_seed)
        report = compare_priors(params, control, sample, config,
                                adapt_bias=not args.no_bias,
                                use_adam=not args.sgd)
        print(f"trained prior final loss:   {report.trained_final_loss:.6g}")
        print(f"untrained prior final loss: "
              f"{report.untrained_final_loss:.6g}")
        extra = {"trained_final": f"{report.trained_final_loss:.6g}",
                 "untrained_final": f"{report.untrained_final_loss:.6g}"}
    _summary("oneshot", label=label_to_char(sample.label),
             iterations=args.iterations, lr=args.lr,
             initial_loss=f"{float(losses[0]):.6g}",
             final_loss=f"{float(losses[-1]):.6g}",
             checkpoint=args.model_out,
             svg=args.svg_out or "-", **extra)


def cmd_classify(args):
    params = _load_model(args.model_in)
    query = _select_sample_any(args.query, args.index)
    config = ClassInferConfig(iterations=args.iterations,
                              learning_rate=args.lr)
    vector, predicted = infer_class(params, query, config)
    if args.vector_out:
        analysis.export_matrix_text(vector.reshape(-1, 1), args.vector_out)
    print(f"predicted: {label_to_char(predicted)}")
    _summary("classify", predicted=label_to_char(predicted),
             iterations=args.iterations, lr=args.lr,
             vector_out=args.vector_out or "-")


def _select_sample_any(corpus_path, index):
    data = load_corpus(corpus_path)
    if not data.samples:
        raise DataError(f"{corpus_path}: empty corpus")
    if not 0 <= index < len(data.samples):
        raise DataError(f"{corpus_path}: sample index {index} out of range")
    return data.samples[index]


def cmd_variants(args):
    params = _load_model(args.model_in)
    manifest = _load_manifest_if_any(args.model_in)
    length = _generation_length(args.length, manifest, [args.label])
    base = generate(params, args.label, length)
    made = generate_variants(params, args.label, args.sigma, args.count,
                             length, args.seed)
    captions = ["base"] + [f"variant {k}" for k in range(args.count)]
    analysis.render_sheet([base] + made, args.svg_out, captions=captions)
    _summary("variants", label=label_to_char(args.label), count=args.count,
             sigma=args.sigma, seed=args.seed, length=length,
             svg=args.svg_out)


def cmd_blend(args):
    params = _load_model(args.model_in)
    manifest = _load_manifest_if_any(args.model_in)
    length = _generation_length(args.length, manifest,
                                [args.label_a, args.label_b])
    alphas = np.linspace(1.0, 0.0, args.steps)
    sheet = [blend(params, args.label_a, args.label_b, float(a), length)
             for a in alphas]
    captions = [f"{a:.2f}/{1 - a:.2f}" for a in alphas]
    analysis.render_sheet(sheet, args.svg_out, captions=captions)
    _summary("blend", label_a=label_to_char(args.label_a),
             label_b=label_to_char(args.label_b), steps=args.steps,
             length=length, svg=args.svg_out)


def cmd_states(args):
    params = _load_model(args.model_in)
    manifest = _load_manifest_if_any(args.model_in)
    length = _generation_length(args.length, manifest, [args.label])
    record = analysis.record_states(params, one_hot(args.label), length)
    c_path = f"{args.out_prefix}_c.svg"
    h_path = f"{args.out_prefix}_h.svg"
    traj_path = f"{args.out_prefix}_traj.svg"
    analysis.export_heatmap(record.cell, c_path, x_label="step",
                            y_label="unit")
    analysis.export_heatmap(record.hidden, h_path, x_label="step",
                            y_label="unit")
    analysis.render_svg(record.trajectory, traj_path)
    if args.export_text:
        analysis.export_matrix_text(record.cell, f"{args.out_prefix}_c.txt")
        analysis.export_matrix_text(record.hidden,
                                    f"{args.out_prefix}_h.txt")
    _summary("states", label=label_to_char(args.label), length=length,
             cell_heatmap=c_path, hidden_heatmap=h_path,
             trajectory=traj_path)


# -----------------------------------------------------------------
# parser plumbing
# -----------------------------------------------------------------

def _build_parser():
    parser = _Parser(prog="glyphnet",
                     description="generative glyph-trajectory model")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    def add(name, fn, helptext):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None,
                       help="key = value file of flag defaults")
        p.set_defaults(func=fn)
        subparsers[name] = p
        return p

    p = add("gen-corpus", cmd_gen_corpus, "write a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--variants", type=int, default=DEFAULT_VARIANTS_PER_CHAR)
    p.add_argument("--jitter", type=float, default=DEFAULT_JITTER_SIGMA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--templates", default=None,
                   help="template document (default: built-in alphabet)")

    p = add("train", cmd_train, "train on the a-m half of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-ff", type=int, default=100)
    p.add_argument("--n-lstm", type=int, default=100)
    p.add_argument("--loss-out", default=None)
    p.add_argument("--checkpoint-every", type=int, default=0)

    p = add("oneshot", cmd_oneshot, "acquire one character one-shot")
    p.add_argument("--model-in", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--label", type=_label_arg, required=True)
    p.add_argument("--index", type=int, default=0,
                   help="which sample of that label to present")
    p.add_argument("--iterations", type=int, default=13000)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--svg-out", default=None)
    p.add_argument("--no-bias", action="store_true",
                   help="freeze the feedforward bias as well")
    p.add_argument("--sgd", action="store_true",
                   help="plain gradient descent instead of Adam")
    p.add_argument("--untrained-control", action="store_true",
                   help="also acquire into an untrained prior and report "
                        "both final losses")
    p.add_argument("--control-seed", type=int, default=999)

    p = add("classify", cmd_classify, "infer the class of a query sample")
    p.add_argument("--model-in", required=True)
    p.add_argument("--query", required=True, help="corpus-format file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--vector-out", default=None)

    p = add("variants", cmd_variants, "generate variants via input noise")
    p.add_argument("--model-in", required=True)
    p.add_argument("--label", type=_label_arg, required=True)
    p.add_argument("--sigma", type=float, default=DEFAULT_NOISE_SIGMA)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=0)
    p.add_argument("--svg-out", required=True)

    p = add("blend", cmd_blend, "blend two characters in an alpha sweep")
    p.add_argument("--model-in", required=True)
    p.add_argument("--label-a", type=_label_arg, required=True)
    p.add_argument("--label-b", type=_label_arg, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--length", type=int, default=0)
    p.add_argument("--svg-out", required=True)

    p = add("states", cmd_states, "hidden-state heatmaps for one label")
    p.add_argument("--model-in", required=True)
    p.add_argument("--label", type=_label_arg, required=True)
    p.add_argument("--length", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--export-text", action="store_true",
                   help="also write the matrices as numeric text")

    return parser, subparsers


_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _apply_config(path, subparser, parser):
    """Read `key = value` lines and install them as flag defaults."""
    dests = {a.dest: a for a in subparser._actions}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        dest = key.strip().replace("-", "_")
        value = value.strip()
        if dest not in dests or dest in ("config", "func", "command"):
            parser.error(f"{path}:{lineno}: unknown option {key.strip()!r}")
        action = dests[dest]
        if isinstance(action, (argparse._StoreTrueAction,
                               argparse._StoreFalseAction)):
            low = value.lower()
            if low in _TRUE_WORDS:
                subparser.set_defaults(**{dest: True})
            elif low in _FALSE_WORDS:
                subparser.set_defaults(**{dest: False})
            else:
                parser.error(f"{path}:{lineno}: bad boolean {value!r}")
        else:
            # argparse runs the type converter on string defaults
            subparser.set_defaults(**{dest: value})
        action.required = False  # a configured option need not appear


def _extract_config_path(argv):
    """Find --config before parsing so configured values can satisfy
    otherwise-required flags."""
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = _build_parser()
    command = argv[0] if argv and not argv[0].startswith("-") else None
    config_path = _extract_config_path(argv)
    try:
        if config_path is not None and command in subparsers:
            _apply_config(config_path, subparsers[command], parser)
        args = parser.parse_args(argv)
        args.func(args)
    except (DataError, CorpusFormatError, OSError) as exc:
        sys.stderr.write(f"glyphnet: error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"glyphnet: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
