"""Hand-authored stroke templates for the 26 lowercase letters.

Coordinates live in the unit square with y up; the baseline sits at 0.35,
x-height at 0.75, ascenders reach 0.95 and descenders 0.05. Visually
related letters share sub-polylines on purpose ('y' starts with the exact
'v' stroke, 'h'/'n'/'m' reuse the arch, 'd'/'g'/'q' reuse a bowl, 'i'/'j'
share the dot), so reuse of hidden dynamics between them is detectable.
"""

from .corpus import GlyphTemplate, char_to_label

# Shared sub-polylines.
_V = [(0.25, 0.75), (0.45, 0.35), (0.65, 0.75)]
_DOT = [(0.44, 0.86), (0.46, 0.89)]
_BOWL = [(0.58, 0.68), (0.45, 0.75), (0.31, 0.68), (0.27, 0.55),
         (0.31, 0.42), (0.45, 0.35), (0.58, 0.42)]


def _arch(x0, width=0.34, top=0.75):
    """Stem-to-stem arch: rises from the stem, curves over, drops to the
    baseline. Used by h, m, n."""
    return [(x0, top - 0.17), (x0 + 0.06 * width / 0.34, top - 0.04),
            (x0 + 0.52 * width, top), (x0 + 0.90 * width, top - 0.08),
            (x0 + width, top - 0.23), (x0 + width, 0.35)]


# letter -> list of (control polyline, resampled point count)
# Sample counts are chosen so held-out letters (n-z) place their pen-up and
# stroke-onset events on step indices that trained letters (a-m) also use;
# one-shot acquisition cannot retime the discrete pen events otherwise.
_TEMPLATES = {
    "a": [([(0.58, 0.70), (0.45, 0.75), (0.32, 0.70), (0.26, 0.55),
            (0.32, 0.40), (0.45, 0.35), (0.58, 0.40), (0.62, 0.55)], 16),
          ([(0.62, 0.75), (0.62, 0.35)], 8)],
    "b": [([(0.25, 0.95), (0.25, 0.35)], 10),
          ([(0.25, 0.68), (0.38, 0.75), (0.52, 0.68), (0.56, 0.55),
            (0.52, 0.42), (0.38, 0.35), (0.25, 0.42)], 14)],
    "c": [([(0.62, 0.66), (0.52, 0.74), (0.38, 0.75), (0.28, 0.66),
            (0.25, 0.55), (0.28, 0.44), (0.38, 0.35), (0.52, 0.36),
            (0.62, 0.44)], 20)],
    "d": [(_BOWL, 14),
          ([(0.62, 0.95), (0.62, 0.35)], 10)],
    "e": [([(0.27, 0.56), (0.60, 0.60), (0.57, 0.70), (0.44, 0.75),
            (0.30, 0.69), (0.25, 0.55), (0.30, 0.41), (0.44, 0.35),
            (0.58, 0.40)], 22)],
    "f": [([(0.58, 0.90), (0.46, 0.95), (0.37, 0.88), (0.35, 0.75),
            (0.35, 0.35)], 14),
          ([(0.24, 0.70), (0.52, 0.70)], 6)],
    "g": [(_BOWL, 14),
          ([(0.62, 0.75), (0.62, 0.22), (0.52, 0.08), (0.36, 0.10)], 10)],
    "h": [([(0.24, 0.95), (0.24, 0.35)], 10),
          (_arch(0.24), 12)],
    "i": [([(0.45, 0.75), (0.45, 0.35)], 16),
          (_DOT, 3)],
    "j": [([(0.52, 0.75), (0.52, 0.22), (0.42, 0.08), (0.30, 0.12)], 16),
          (_DOT, 3)],
    "k": [([(0.24, 0.95), (0.24, 0.35)], 10),
          ([(0.56, 0.72), (0.26, 0.50)], 6),
          ([(0.34, 0.56), (0.58, 0.35)], 6)],
    "l": [([(0.45, 0.95), (0.45, 0.40), (0.50, 0.35), (0.55, 0.38)], 22)],
    "m": [([(0.20, 0.75), (0.20, 0.35)], 8),
          (_arch(0.20, width=0.22), 10),
          (_arch(0.42, width=0.22), 10)],
    "n": [([(0.26, 0.75), (0.26, 0.35)], 10),
          (_arch(0.26), 12)],
    "o": [([(0.45, 0.75), (0.31, 0.69), (0.25, 0.55), (0.31, 0.41),
            (0.45, 0.35), (0.59, 0.41), (0.65, 0.55), (0.59, 0.69),
            (0.45, 0.75)], 22)],
    "p": [([(0.26, 0.75), (0.26, 0.05)], 10),
          ([(0.26, 0.67), (0.39, 0.75), (0.53, 0.68), (0.57, 0.55),
            (0.53, 0.42), (0.39, 0.35), (0.26, 0.43)], 14)],
    "q": [(_BOWL, 14),
          ([(0.62, 0.75), (0.62, 0.15), (0.70, 0.05)], 8)],
    "r": [([(0.30, 0.75), (0.30, 0.35)], 10),
          ([(0.30, 0.58), (0.36, 0.70), (0.48, 0.75), (0.58, 0.69)], 9)],
    "s": [([(0.60, 0.69), (0.47, 0.75), (0.33, 0.71), (0.29, 0.61),
            (0.37, 0.53), (0.51, 0.49), (0.58, 0.41), (0.50, 0.35),
            (0.34, 0.36), (0.27, 0.43)], 24)],
    "t": [([(0.43, 0.90), (0.43, 0.42), (0.49, 0.35), (0.58, 0.39)], 14),
          ([(0.28, 0.73), (0.58, 0.73)], 6)],
    "u": [([(0.26, 0.75), (0.26, 0.46), (0.33, 0.36), (0.48, 0.36),
            (0.57, 0.45), (0.57, 0.75), (0.57, 0.35)], 20)],
    "v": [(_V, 16)],
    "w": [([(0.16, 0.75), (0.27, 0.35), (0.42, 0.66), (0.57, 0.35),
            (0.68, 0.75)], 26)],
    "x": [([(0.25, 0.75), (0.62, 0.35)], 10),
          ([(0.62, 0.75), (0.25, 0.35)], 10)],
    # 'y' opens with the identical 'v' stroke (same polyline, same sample
    # count) and appends the descender tail.
    "y": [(_V, 16),
          ([(0.65, 0.75), (0.50, 0.38), (0.40, 0.16), (0.28, 0.05)], 10)],
    "z": [([(0.27, 0.75), (0.61, 0.75), (0.27, 0.35), (0.61, 0.35)], 20)],
}


def default_templates():
    """One template per letter, ordered a-z."""
    out = []
    for ch in sorted(_TEMPLATES):
        strokes = [poly for poly, _ in _TEMPLATES[ch]]
        counts = [n for _, n in _TEMPLATES[ch]]
        out.append(GlyphTemplate(label=char_to_label(ch), strokes=strokes,
                                 samples_per_stroke=counts))
    return out
