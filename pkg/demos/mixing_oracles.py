"""Two independent ways to decide mixing of a Markov interval map.

Route one reads the covering matrix and asks whether it is primitive.
Route two never builds a matrix: it iterates exact images of the cells until
every image contains every cell or the Wielandt bound runs out.

    python3 demos/mixing_oracles.py
"""
from puremix.certify import brute_force_mixing
from puremix.markov import covering_matrix, is_primitive, markov_partition_of, primitivity_exponent
from puremix.spaces import circle_corpus, markov_corpus


def main():
    agree = 0
    rows = markov_corpus() + circle_corpus()
    for name, m in rows:
        part = markov_partition_of(m)
        M = covering_matrix(m, part.members)
        prim = is_primitive(M)
        brute = brute_force_mixing(m, part.members)
        agree += prim == brute
        exp = primitivity_exponent(M)
        print(f"{name:16s} cells={len(part):2d} primitive={str(prim):5s} images={str(brute):5s} exponent={exp}")
    print(f"\n{agree}/{len(rows)} maps: both routes agree")


if __name__ == "__main__":
    main()
