#!/usr/bin/env python3
"""Generate the synthetic micro-corpus under data/micro/.

A toy Arabic-like language in Buckwalter transliteration. Every token carries
the 16-feature analysis (diac, lemma, 14 tags). Surfaces drop short vowels,
so person, gender, case and state must come from context. Two orthographic
variations are injected into surfaces only:

* word-final taa marbuta `p` written as `h` in about half of the sentences
  (the gold diac keeps `p`), and
* hamza seat `>` written as bare `A` at random (undone by normalization.tsv).

Output is a pure function of the seed.
"""

import argparse
import random
from pathlib import Path

TAGS = ["pos", "prc3", "prc2", "prc1", "prc0", "per", "asp", "vox", "mod",
        "gen", "num", "stt", "cas", "enc0"]
VOWELS = set("aiuo~FNK")

# (lemma, perfective stem vowels, imperfective stem, imperfective final vowel)
VERBS = [
    ("katab", "katab", "kotub"),
    ("daras", "daras", "dorus"),
    ("Eamil", "Eamil", "Eomal"),
    ("fataH", "fataH", "fotaH"),
    ("rasam", "rasam", "rosum"),
    ("Talab", "Talab", "Tolub"),
    ("jalas", "jalas", "jolis"),
    ("nazal", "nazal", "nozil"),
]
# (lemma, stem, gender)
NOUNS = [
    ("kitAb", "kitAb", "m"),
    ("qalam", "qalam", "m"),
    ("daros", "daros", "m"),
    ("bAb", "bAb", "m"),
    ("walad", "walad", "m"),
    ("sayof", "sayof", "m"),
    ("madorasap", "madorasap", "f"),
    ("sayAr~ap", "sayAr~ap", "f"),
    ("muEal~imap", "muEal~imap", "f"),
    ("jAmiEap", "jAmiEap", "f"),
    ("risAlap", "risAlap", "f"),
]
ADJS = [("kabiyr", "kabiyr"), ("jadiyd", "jadiyd"), ("Tawiyl", "Tawiyl")]
# (diac, per, gen, num)
PRONOUNS = [
    ("huwa", "3", "m", "s"),
    ("hiya", "3", "f", "s"),
    (">anA", "1", "m", "s"),
    (">anota", "2", "m", "s"),
    ("hum", "3", "m", "p"),
]
PREPS = ["fiy", "EalaY", "min"]

PERF_SUFFIX = {("1", "m", "s"): "otu", ("2", "m", "s"): "ota", ("3", "m", "s"): "a",
               ("3", "f", "s"): "at", ("3", "m", "p"): "uwA"}
IMPF_PREFIX = {("1", "m", "s"): ">a", ("2", "m", "s"): "ta", ("3", "m", "s"): "ya",
               ("3", "f", "s"): "ta", ("3", "m", "p"): "ya"}
IMPF_SUFFIX = {("3", "m", "p"): "uwna"}
VERB_ENC = {"0": "", "dobj_3fs": "hA", "dobj_3mp": "hum"}
NOUN_ENC = {"poss_3fs": "hA", "poss_3mp": "hum"}
CASE_DEF = {"n": "u", "a": "a", "g": "i"}
CASE_INDEF = {"n": "N", "a": "F", "g": "K"}


def surface_of(diac):
    return "".join(c for c in diac if c not in VOWELS)


def analysis(diac, lemma, **tags):
    row = {t: "na" for t in TAGS}
    for t in ("prc3", "prc2", "prc1", "prc0", "enc0"):
        row[t] = "0"
    row.update(tags)
    return (diac, lemma, tuple(row[t] for t in TAGS))


def pronoun(p, wa=False):
    diac, per, gen, num = p
    prc2 = "wa_conj" if wa else "0"
    return analysis(("wa" if wa else "") + diac, diac, pos="pron", per=per, gen=gen, num=num,
                    prc2=prc2)


def verb(v, agr, aspect, enc="0", wa=False):
    lemma, perf, impf = v
    per, gen, num = agr
    if aspect == "p":
        stem = perf + PERF_SUFFIX[agr]
    else:
        stem = IMPF_PREFIX[agr] + impf + IMPF_SUFFIX.get(agr, "u")
    if enc != "0" and stem.endswith("uwA"):
        stem = stem[:-1]
    diac = ("wa" if wa else "") + stem + VERB_ENC[enc]
    return analysis(diac, lemma + "a", pos="verb", per=per, asp=aspect, vox="a", mod="i",
                    gen=gen, num=num, prc2="wa_conj" if wa else "0", enc0=enc)


def nominal(pos, lemma, stem, gen, state, case, enc="0", bi=False):
    if state == "i":
        body = stem + CASE_INDEF[case]
        if case == "a" and not stem.endswith("p"):
            body += "A"
    elif state == "d":
        body = "Al" + stem + CASE_DEF[case]
    else:
        base = stem[:-1] + "t" if enc != "0" and stem.endswith("p") else stem
        body = base + CASE_DEF[case] + NOUN_ENC.get(enc, "")
    diac = ("bi" if bi else "") + body
    return analysis(diac, lemma, pos=pos, gen=gen, num="s", stt=state, cas=case,
                    prc1="bi_prep" if bi else "0", prc0="Al_det" if state == "d" else "0",
                    enc0=enc)


def noun(n, state, case, enc="0", bi=False):
    lemma, stem, gen = n
    return nominal("noun", lemma, stem, gen, state, case, enc, bi)


def adj(a, gen, state, case):
    lemma, stem = a
    return nominal("adj", lemma, stem + ("ap" if gen == "f" else ""), gen, state, case)


def prep(p):
    return analysis(p, p, pos="prep")


def paradigm():
    out = []
    for p in PRONOUNS:
        out += [pronoun(p), pronoun(p, True)]
    for v in VERBS:
        for agr in PERF_SUFFIX:
            for aspect in "pi":
                for enc in VERB_ENC:
                    for wa in (False, True):
                        out.append(verb(v, agr, aspect, enc, wa))
    for n in NOUNS:
        for case in "nag":
            for state in "dic":
                out.append(noun(n, state, case))
            for enc in NOUN_ENC:
                out.append(noun(n, "c", case, enc))
        out.append(noun(n, "d", "g", bi=True))
    for a in ADJS:
        for gen in "mf":
            for state in "di":
                for case in "nag":
                    out.append(adj(a, gen, state, case))
    for p in PREPS:
        out.append(prep(p))
    return out


def noun_phrase(rng, case, allow_enc=True):
    """Noun (+ optional adjective or definite genitive complement)."""
    n = rng.choice(NOUNS)
    shape = rng.choice(["d", "i", "d_adj", "i_adj", "idafa", "enc"] if allow_enc
                       else ["d", "i", "d_adj", "i_adj", "idafa"])
    if shape in ("d", "i"):
        return [noun(n, shape, case)]
    if shape.endswith("adj"):
        state = shape[0]
        return [noun(n, state, case), adj(rng.choice(ADJS), n[2], state, case)]
    if shape == "idafa":
        return [noun(n, "c", case), noun(rng.choice(NOUNS), "d", "g")]
    return [noun(n, "c", case, rng.choice(list(NOUN_ENC)))]


def pp(rng):
    if rng.random() < 0.3:
        return [noun(rng.choice(NOUNS), "d", "g", bi=True)]
    return [prep(rng.choice(PREPS))] + noun_phrase(rng, "g")


def sentence(rng):
    kind = rng.choice(["pron", "pron", "vso", "pp_first"])
    wa = rng.random() < 0.25
    if kind == "pron":
        p = rng.choice(PRONOUNS)
        agr = p[1:]
        toks = [pronoun(p, wa)]
        enc = rng.choice(["0", "0", "dobj_3fs", "dobj_3mp"])
        toks.append(verb(rng.choice(VERBS), agr, rng.choice("pi"), enc))
        if enc == "0":
            toks += noun_phrase(rng, "a")
    elif kind == "vso":
        n = rng.choice(NOUNS)
        agr = ("3", n[2], "s")
        toks = [verb(rng.choice(VERBS), agr, rng.choice("pi"), wa=wa), noun(n, "d", "n")]
        toks += noun_phrase(rng, "a", allow_enc=False)
    else:
        toks = pp(rng)
        p = rng.choice(PRONOUNS)
        toks += [pronoun(p), verb(rng.choice(VERBS), p[1:], rng.choice("pi"))]
    if rng.random() < 0.5:
        toks += pp(rng)
    return toks


def corrupt(rng, toks):
    """Surfaces for one sentence, with the orthographic variations applied."""
    taa = rng.random() < 0.5
    out = []
    for diac, _, _ in toks:
        s = surface_of(diac)
        if taa and s.endswith("p"):
            s = s[:-1] + "h"
        if ">" in s and rng.random() < 0.5:
            s = s.replace(">", "A")
        out.append(s)
    return out


def write_rows(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write("".join(rows))


def token_line(surface, a):
    diac, lemma, tags = a
    return "\t".join([surface, diac, lemma, *tags]) + "\n"


def corpus_text(rng, count, seen):
    lines = []
    made = 0
    while made < count:
        toks = sentence(rng)
        key = tuple(a[0] for a in toks)
        if key in seen:
            continue
        seen.add(key)
        surfaces = corrupt(rng, toks)
        lines += [token_line(s, a) for s, a in zip(surfaces, toks)] + ["\n"]
        made += 1
    return lines


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "micro"))
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--sentences", type=int, default=50)
    ap.add_argument("--test-sentences", type=int, default=20)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    seen = set()
    header = "# surface\tdiac\tlemma\t" + "\t".join(TAGS) + "\n"
    write_rows(out / "corpus.tsv", [header] + corpus_text(rng, args.sentences, seen))
    write_rows(out / "test.tsv", [header] + corpus_text(rng, args.test_sentences, seen))

    entries = []
    for a in paradigm():
        s = surface_of(a[0])
        variants = {s, s[:-1] + "h"} if s.endswith("p") else {s}
        entries += [token_line(v, a) for v in sorted(variants)]
    write_rows(out / "dictionary.tsv", [header] + entries)


if __name__ == "__main__":
    main()
