#!/usr/bin/env python3
"""Regenerates the cleaning goldens with an independent Python implementation.

Uses the standard `re` module and NLTK's Snowball English stemmer, so the C++
cleaner is checked against a second implementation rather than against its
own output. Run from any directory:

    python3 tests/golden/make_golden.py

Writes tests/golden/clean/<case>.in.txt, <case>.clean.txt and <case>.tokens.txt.
"""

import pathlib
import re

from nltk.stem.snowball import SnowballStemmer

HERE = pathlib.Path(__file__).resolve().parent
OUT = HERE / "clean"

DOMAIN_STOPWORDS = ["tickets", "ticketing", "mailto", "wrote", "re", "fwd"]
BIGRAMS = [["high", "performance", "computing"], ["los", "alamos"]]
FOOTER = r"(?:^|\n)-- [\s\S]*\Z"
PHONE = r"(\d{3}-\d{3}-\d{4})|\d{3} \d{3}-\d{4}"
HEX = r"0x[0-9a-f]+|[0-9a-f]{16}"
SYMBOLS = "[!#<>:\\[\\]\\{\\}€,\\\"\\(\\)\\*;]+|[\\.\\?]\\s|:[-_~=\\.]{2,}"
PATTERNS = {
    "alpha_only": r"[a-z]{2,}",
    "alnum_leading_letter": r"[a-z]\w+",
    "alnum_with_paths": r"[a-zA-Z/][\w/?.=]+",
}
# NLTK's English stopword list (179 words).
ENGLISH_STOPWORDS = """
i me my myself we our ours ourselves you you're you've you'll you'd your yours yourself
yourselves he him his himself she she's her hers herself it it's its itself they them their
theirs themselves what which who whom this that that'll these those am is are was were be been
being have has had having do does did doing a an the and but if or because as until while of
at by for with about against between into through during before after above below to from up
down in out on off over under again further then once here there when where why how all any
both each few more most other some such no nor not only own same so than too very s t can will
just don don't should should've now d ll m o re ve y ain aren aren't couldn couldn't didn
didn't doesn doesn't hadn hadn't hasn hasn't haven haven't isn isn't ma mightn mightn't mustn
mustn't needn needn't shan shan't shouldn shouldn't wasn wasn't weren weren't won won't wouldn
wouldn't
""".split()

A = re.ASCII
stemmer = SnowballStemmer("english")


def stem_word(w):
    return stemmer.stem(w) if re.fullmatch(r"[a-z']+", w, A) else w


def clean(text):
    s = re.sub(r"[^\x00-\x7f]", "", text)
    s = re.sub(FOOTER, " footer ", s, flags=A)
    s = s.lower()
    words = sorted(DOMAIN_STOPWORDS, key=len, reverse=True)
    s = re.sub(r"\b(?:" + "|".join(map(re.escape, words)) + r")\b", "", s, flags=A)
    s = re.sub(PHONE, " phone_number ", s, flags=A)
    s = re.sub(r"http(s)?://", "http_", s, flags=A).replace("@", "_").replace("-", "_")
    while True:
        nxt = re.sub(SYMBOLS, " ", s, flags=A)
        if nxt == s:
            break
        s = nxt
    s = re.sub(HEX, " hex_number ", s, flags=A)
    s = re.sub(r"[^ \t\n\r\f\v]+", lambda m: stem_word(m.group(0)), s)
    words = [w for w in re.split(r"[ \t\n\r\f\v]+", s) if w]
    phrases = sorted(([stemmer.stem(w) for w in b], "_".join(b)) for b in BIGRAMS)
    phrases.sort(key=lambda p: len(p[0]), reverse=True)
    out, i = [], 0
    while i < len(words):
        for stems, joined in phrases:
            if words[i:i + len(stems)] == stems:
                out.append(joined)
                i += len(stems)
                break
        else:
            out.append(words[i])
            i += 1
    return " ".join(out)


def tokenize(clean_text, pattern):
    regex = r"(?:(?<=\s)|^)(" + PATTERNS[pattern] + r")(?=\s|$)"
    return re.findall(regex, clean_text, A)


STOP = set(ENGLISH_STOPWORDS) | {stemmer.stem(w) for w in ENGLISH_STOPWORDS}

CASES = {
    "phone_dashed": "Call 505-667-1234 ASAP",
    "phone_spaced": "My number is 505 667-1234. Call me.",
    "phone_overlong": "extension 505-667-12345 rings twice",
    "url_https": "see https://hpc.lanl.gov",
    "url_http_query": "Docs at http://example.com/guide?page=2 explain it",
    "email_address": "contact jdoe@lanl.gov for help",
    "hyphens": "re-run the multi-node job with ssh-keygen -t rsa",
    "hex_prefixed": "ptr=0xdeadbeef failed",
    "hex_uppercase": "Segfault at 0xDEADBEEF in libc",
    "hex_sixteen": "checksum 0123456789abcdef mismatch",
    "non_ascii": "café naïve résumé — “quoted” £100",
    "footer": "Thanks for the fix.\n-- \nHPC Consult Team\nhttps://hpc.example.gov/consult\n",
    "footer_absent": "A line with -- dashes but no footer marker--here",
    "domain_stopwords": "RE: Fwd: tickets about ticketing wrote mailto:x@y.org",
    "domain_stopwords_inside_words": "Ticketed retired rewrote forward are kept",
    "stemming": "Running jobs failed repeatedly while nodes were rebooting",
    "bigram_trigram": "High Performance Computing at Los Alamos",
    "bigram_partial": "high performance storage near los angeles",
    "bigram_repeated": "los alamos los alamos national lab",
    "symbols": "[error] {code}: (x); *bold* #tag <tag> \"quote\" a,b!",
    "sentence_ends": "What? Really. Yes. No?",
    "separator_runs": "note:---- done :== ok :~~ fine :._ end",
    "dot_runs": "wait.. what?? ok... right",
    "whitespace": "  multiple\t\tspaces\n\nnewlines\r\n end  ",
    "file_paths": "/usr/projects/hpc/job.sh failed; see /tmp/x and ~/out.log",
    "modules": "module load openmpi/2.1.2 gcc/7.3.0 && make -j8",
    "token_mix": "run job2 /usr/bin/x 42",
    "apostrophes": "The user's jobs don't start and 'quoted' words",
    "quoted_reply": "Fixed now.\n\nOn Mon, Jan 1, 2018 at 10:00 AM John wrote:\n> it is broken\n> please help",
    "english_stopwords": "I am not able to do this because it is very slow and they are waiting",
    "empty": "",
    "numbers_only": "12345 678 9",
    "key_values": "job=12345 node=cn101 state=FAILED exit=137",
    "slurm_error": "sbatch: error: Batch job submission failed: Invalid account or account/partition combination",
    "kernel_log": "Jul 10 12:00:01 gr0101 kernel: [12345.678] oom-killer invoked on cn0042",
    "mixed_case_words": "Python3 NumPy MPI_Init CUDA_VISIBLE_DEVICES=0,1",
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.txt"):
        old.unlink()
    for name, text in CASES.items():
        cleaned = clean(text)
        lines = [f"{p}: {' '.join(tokenize(cleaned, p))}" for p in PATTERNS]
        kept = [t for t in tokenize(cleaned, "alnum_with_paths") if t not in STOP]
        lines.append("alnum_with_paths-stopwords_removed: " + " ".join(kept))
        (OUT / f"{name}.in.txt").write_bytes(text.encode("utf-8"))
        (OUT / f"{name}.clean.txt").write_text(cleaned + "\n")
        (OUT / f"{name}.tokens.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(CASES)} cases to {OUT}")


if __name__ == "__main__":
    main()
