#!/usr/bin/env python3
# Copyright 2026 The CSG Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Trains a tiny model with the csg binary and loads its vector files with gensim.

Usage: check_word2vec_format.py PATH_TO_CSG

Exits 0 when gensim reads both the binary and the text file and the two agree,
1 on a mismatch, and 77 when gensim is not installed.
"""

import pathlib
import subprocess
import sys
import tempfile

try:
    from gensim.models import KeyedVectors
except ImportError:
    print("gensim not installed; skipping")
    sys.exit(77)

import numpy as np


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__)
        return 2
    csg = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        corpus = tmp / "corpus.txt"
        words = ["alpha", "beta", "gamma", "delta", "café", "naïve", "x"]
        lines = [" ".join(words[(i + j) % len(words)] for j in range(9)) for i in range(200)]
        corpus.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out = tmp / "vectors.bin"
        subprocess.run(
            [csg, "train", "--corpus", str(corpus), "--output", str(out), "--save-text",
             "--dim", "17", "--epochs", "1", "--min-count", "1", "--threads", "1"],
            check=True, capture_output=True)

        binary = KeyedVectors.load_word2vec_format(str(out), binary=True)
        text = KeyedVectors.load_word2vec_format(str(tmp / "vectors.txt"), binary=False)

        ok = True
        if binary.index_to_key != text.index_to_key:
            print("word lists differ between binary and text files")
            ok = False
        if sorted(binary.index_to_key) != sorted(words):
            print("unexpected vocabulary:", binary.index_to_key)
            ok = False
        if binary.vector_size != 17 or text.vector_size != 17:
            print("unexpected dimension")
            ok = False
        if ok:
            err = float(np.max(np.abs(binary.vectors - text.vectors)))
            print(f"{len(binary.index_to_key)} words, dim {binary.vector_size}, max text error {err:.2e}")
            ok = err <= 1e-4
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
