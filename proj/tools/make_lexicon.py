#!/usr/bin/env python3
"""Build data/lexicon.tsv from a word frequency list.

Input is a TSV of `word<TAB>relative_frequency`, most frequent first. The
bundled lexicon was made from the English list shipped with wordfreq 3.1.1.
Words of the reading texts that miss the cut are appended with their own
frequency (or count 1 when unlisted), so every text word has a real count.
A cloze column marks a fixed set of function words as highly predictable.
"""

import argparse
import pathlib
import re

HIGH_CLOZE = [
    "the", "of", "to", "and", "a", "in", "that", "was", "for", "on",
    "with", "at", "by", "from", "as", "be", "it", "is", "an", "their",
]


def read_freqs(path):
    freqs = {}
    for line in pathlib.Path(path).read_text().splitlines():
        word, value = line.split("\t")[:2]
        if re.fullmatch("[a-z]+", word) and word not in freqs:
            freqs[word] = float(value)
    return freqs


def text_words(texts_dir):
    words = set()
    for path in sorted(pathlib.Path(texts_dir).glob("*.txt")):
        words.update(re.findall("[a-z]+", path.read_text().lower()))
    return words


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--freqs", required=True)
    parser.add_argument("--texts", default="data/texts")
    parser.add_argument("--top", type=int, default=5000)
    parser.add_argument("--scale", type=float, default=1e9)
    parser.add_argument("--cloze", type=float, default=0.85)
    parser.add_argument("--out", default="data/lexicon.tsv")
    args = parser.parse_args()

    freqs = read_freqs(args.freqs)
    chosen = list(freqs)[: args.top]
    present = set(chosen)
    chosen += sorted(w for w in text_words(args.texts) if w not in present)

    with open(args.out, "w") as out:
        out.write("word\tcount\tpredictability\n")
        for word in chosen:
            count = max(1, round(freqs.get(word, 0.0) * args.scale))
            cloze = f"{args.cloze:.2f}" if word in HIGH_CLOZE else ""
            out.write(f"{word}\t{count}\t{cloze}\n")


if __name__ == "__main__":
    main()
