"""Synthetic character trajectories in the pen-delta format.

A sample is a sequence of (dx, dy, pressure, stroke_onset) rows. Strokes are
rendered from hand-authored control polylines: resample each stroke at
uniform arc length, difference consecutive positions into deltas, and join
strokes with a single zero-pressure pen-up point that carries the jump to
the next stroke start. The pen starts at the first stroke's first point, so
every stroke-onset row has a zero delta and pressure one.

The alphabet is split into a trained half (a-m) and a held-out half (n-z).
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

N_LABELS = 26
TRAINED_LABELS = frozenset(range(13))          # a-m
HELDOUT_LABELS = frozenset(range(13, 26))      # n-z

# Default Gaussian jitter (in canvas units) applied to template control
# points when generating corpus variants.
DEFAULT_JITTER_SIGMA = 0.02
DEFAULT_VARIANTS_PER_CHAR = 40

# Column order of a sample's points array; matches the network readout.
COL_DX, COL_DY, COL_PRESSURE, COL_ONSET = 0, 1, 2, 3


class CorpusFormatError(ValueError):
    """Malformed corpus or template file."""


class TrajectoryPoint(NamedTuple):
    dx: float
    dy: float
    pressure: float
    stroke_onset: float


@dataclass
class CharacterSample:
    """Labeled variable-length trajectory; points is a [T, 4] float array."""

    label: int
    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if not 0 <= self.label < N_LABELS:
            raise ValueError(f"label {self.label} outside [0, {N_LABELS - 1}]")
        if self.points.ndim != 2 or self.points.shape[1] != 4:
            raise ValueError("points must be a [T, 4] array")
        if len(self.points) < 2:
            raise ValueError("a sample needs at least 2 points")

    def __len__(self):
        return len(self.points)

    def point(self, t):
        return TrajectoryPoint(*self.points[t])

    def validate(self):
        """Check the data-format invariants; raises ValueError on violation."""
        p = self.points[:, COL_PRESSURE]
        s = self.points[:, COL_ONSET]
        if not ((p >= 0.0) & (p <= 1.0)).all():
            raise ValueError("pressure outside [0, 1]")
        if not np.isin(s, (0.0, 1.0)).all():
            raise ValueError("stroke_onset must be 0 or 1")
        if s[0] != 1.0:
            raise ValueError("first point must open a stroke")


@dataclass
class GlyphTemplate:
    """Control polylines in the unit square plus per-stroke sample counts."""

    label: int
    strokes: list            # list of [K, 2] float arrays
    samples_per_stroke: list  # ints >= 2, same length as strokes

    def __post_init__(self):
        self.strokes = [np.asarray(s, dtype=np.float64) for s in self.strokes]
        if not self.strokes:
            raise ValueError("template needs at least one stroke")
        if len(self.strokes) != len(self.samples_per_stroke):
            raise ValueError("one sample count per stroke required")
        for k, stroke in enumerate(self.strokes):
            if stroke.ndim != 2 or stroke.shape[1] != 2 or len(stroke) < 2:
                raise ValueError(f"stroke {k}: need >= 2 control points")
            if (stroke < 0.0).any() or (stroke > 1.0).any():
                raise ValueError(f"stroke {k}: control points must lie in "
                                 "the unit square")
            if self.samples_per_stroke[k] < 2:
                raise ValueError(f"stroke {k}: sample count must be >= 2")

    @property
    def n_points(self):
        """Length of the rendered trajectory (pen-up joints included)."""
        return sum(self.samples_per_stroke) + len(self.strokes) - 1


@dataclass
class Corpus:
    samples: list = field(default_factory=list)
    trained_labels: frozenset = TRAINED_LABELS
    heldout_labels: frozenset = HELDOUT_LABELS

    def __len__(self):
        return len(self.samples)

    def filter(self, labels):
        return Corpus(samples=[s for s in self.samples if s.label in labels])

    def by_label(self, label):
        return [s for s in self.samples if s.label == label]


def label_to_char(label):
    return chr(ord("a") + label)


def char_to_label(ch):
    label = ord(ch) - ord("a")
    if not 0 <= label < N_LABELS:
        raise ValueError(f"character {ch!r} outside a-z")
    return label


def _resample_stroke(points, n_samples):
    """n_samples positions at uniform arc length along a control polyline."""
    seg = np.diff(points, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    keep = seg_len > 0.0
    if not keep.any():
        raise ValueError("degenerate stroke: all control points coincide")
    # Drop zero-length segments so the arc-length parameter is strictly
    # increasing for interpolation.
    pts = np.vstack([points[:1], points[1:][keep]])
    arc = np.concatenate([[0.0], np.cumsum(seg_len[keep])])
    want = np.linspace(0.0, arc[-1], n_samples)
    return np.column_stack([np.interp(want, arc, pts[:, 0]),
                            np.interp(want, arc, pts[:, 1])])


def render_template(template, jitter_sigma, seed):
    """Render a template into a CharacterSample.

    Control points are perturbed with zero-mean Gaussian jitter of scale
    jitter_sigma before resampling, so repeated calls with different seeds
    produce distinct variants of the same glyph. Pure function of
    (template, jitter_sigma, seed).
    """
    if jitter_sigma < 0:
        raise ValueError("jitter_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    rows = []
    pen = None
    for k, stroke in enumerate(template.strokes):
        jittered = stroke + rng.normal(0.0, jitter_sigma, size=stroke.shape)
        try:
            pos = _resample_stroke(jittered, template.samples_per_stroke[k])
        except ValueError as exc:
            raise ValueError(f"stroke {k} of template "
                             f"{label_to_char(template.label)!r}: {exc}") \
                from None
        if pen is None:
            pen = pos[0]
        else:
            jump = pos[0] - pen
            rows.append((jump[0], jump[1], 0.0, 0.0))  # pen-up travel
            pen = pos[0]
        rows.append((0.0, 0.0, 1.0, 1.0))              # stroke onset
        deltas = np.diff(pos, axis=0)
        for d in deltas:
            rows.append((d[0], d[1], 1.0, 0.0))
        pen = pos[-1]
    return CharacterSample(label=template.label,
                           points=np.array(rows, dtype=np.float64))


def integrate_deltas(deltas):
    """Cumulative positions of a delta sequence, starting from (0, 0):
    position[t] = sum of deltas up to and including t."""
    deltas = np.asarray(deltas, dtype=np.float64)
    return np.cumsum(deltas[:, :2], axis=0)


def integrate(sample):
    """Absolute pen positions of a sample, one per time step."""
    return integrate_deltas(sample.points)


def save_corpus(corpus, path):
    """One line per sample: label, then T quadruples of
    (dx, dy, pressure, stroke_onset) as repr-round-trip decimal text."""
    with open(path, "w") as fh:
        for sample in corpus.samples:
            parts = [str(sample.label)]
            for row in sample.points:
                parts.extend(repr(float(v)) for v in row)
            fh.write(" ".join(parts) + "\n")


def load_corpus(path):
    samples = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields_ = line.split()
            if (len(fields_) - 1) % 4 != 0 or len(fields_) < 9:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected a label plus 4*T fields "
                    f"(T >= 2), got {len(fields_)} fields")
            try:
                label = int(fields_[0])
            except ValueError:
                raise CorpusFormatError(
                    f"{path}:{lineno}: field 1: bad label "
                    f"{fields_[0]!r}") from None
            values = np.empty(len(fields_) - 1)
            for idx, tok in enumerate(fields_[1:], start=2):
                try:
                    values[idx - 2] = float(tok)
                except ValueError:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: field {idx}: bad number "
                        f"{tok!r}") from None
            samples.append(CharacterSample(label=label,
                                           points=values.reshape(-1, 4)))
    return Corpus(samples=samples)


def sample_seed(master_seed, label, variant):
    """Stable per-sample integer seed for corpus generation."""
    ss = np.random.SeedSequence((master_seed, label, variant))
    return int(ss.generate_state(1)[0])


def generate_corpus(templates, variants_per_char, jitter_sigma, seed,
                    labels=None):
    """Render variants_per_char jittered samples for each template whose
    label is in `labels` (default: all)."""
    samples = []
    for template in templates:
        if labels is not None and template.label not in labels:
            continue
        for k in range(variants_per_char):
            samples.append(render_template(
                template, jitter_sigma,
                sample_seed(seed, template.label, k)))
    return Corpus(samples=samples)


def save_templates(templates, path):
    """Plain-text template document: one line per stroke,
    `<letter> <samples> x,y x,y ...`, strokes in drawing order."""
    with open(path, "w") as fh:
        fh.write("# glyph templates: letter, sample count, control points\n")
        for template in templates:
            ch = label_to_char(template.label)
            for stroke, n in zip(template.strokes,
                                 template.samples_per_stroke):
                pts = " ".join(f"{float(p[0])!r},{float(p[1])!r}"
                               for p in stroke)
                fh.write(f"{ch} {n} {pts}\n")


def load_templates(path):
    """Parse the save_templates format back into GlyphTemplate objects,
    ordered by label."""
    strokes = {}
    counts = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields_ = line.split()
            if len(fields_) < 3:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected letter, sample count and "
                    "at least two control points")
            try:
                label = char_to_label(fields_[0])
            except ValueError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: field 1: {exc}") \
                    from None
            try:
                n = int(fields_[1])
            except ValueError:
                raise CorpusFormatError(
                    f"{path}:{lineno}: field 2: bad sample count "
                    f"{fields_[1]!r}") from None
            pts = []
            for idx, tok in enumerate(fields_[2:], start=3):
                try:
                    sx, sy = tok.split(",")
                    pts.append((float(sx), float(sy)))
                except ValueError:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: field {idx}: bad point "
                        f"{tok!r}") from None
            strokes.setdefault(label, []).append(pts)
            counts.setdefault(label, []).append(n)
    return [GlyphTemplate(label=label, strokes=strokes[label],
                          samples_per_stroke=counts[label])
            for label in sorted(strokes)]
