"""Worked examples used as regression fixtures and by ``bench``.

Three targets over small alphabets, hand-written plans for them as
certificates, and the values claimed alongside those plans.
"""

SCAFFOLD = "11221122110001100110011"
SITES = "10113121101011212111211"
SITES_EXTENDED = "101131211010112121112111011"

TARGETS = (SCAFFOLD, SITES, SITES_EXTENDED)

# claimed canonical index, claimed templated upper bound
CLAIMED_ASI = {SCAFFOLD: 12, SITES: 13, SITES_EXTENDED: 14}
CLAIMED_TAI_UPPER = {SCAFFOLD: 11, SITES: 12, SITES_EXTENDED: 13}

# (skeleton, fillers, target, claimed gain) under the |y| - 1 proxy
CLAIMED_GAINS = (
    ("11*11*11", ("22", "00"), SCAFFOLD, 7),
    ("1*11", ("0", "2"), SITES, 7),
    ("1*11", ("0", "2"), SITES_EXTENDED, 9),
)

SCAFFOLD_CANONICAL = """\
target 11221122110001100110011
mode canonical
m 0
m 1
m 2
c 1 1      # 4: 00
c 2 2      # 5: 11
c 3 3      # 6: 22
c 5 4      # 7: 1100
c 6 5      # 8: 2211
c 8 1      # 9: 22110
c 4 7      # 10: 001100
c 7 5      # 11: 110011
c 5 8      # 12: 112211
c 12 9     # 13: 11221122110
c 10 11    # 14: 001100110011
c 13 14    # 15: target
"""

SCAFFOLD_TEMPLATED = """\
target 11221122110001100110011
mode templated
m 1
m *
m 2
m 0
c 1 1          # 5: 11
c 5 2          # 6: 11*
c 6 6          # 7: 11*11*
c 7 5          # 8: 11*11*11
c 3 3          # 9: 22
c 4 4          # 10: 00
t 8 {1,2} 9    # 11: 1122112211
t 8 {1,2} 10   # 12: 1100110011
c 10 4         # 13: 000
c 11 13        # 14: 1122112211000
c 14 12        # 15: target
"""

SITES_CANONICAL = """\
target 10113121101011212111211
mode canonical
m 0
m 1
m 2
m 3
c 1 2      # 5: 01
c 3 2      # 6: 21
c 5 2      # 7: 011
c 6 2      # 8: 211
c 7 4      # 9: 0113
c 2 8      # 10: 1211
c 7 6      # 11: 01121
c 2 9      # 12: 10113
c 10 5     # 13: 121101
c 8 10     # 14: 2111211
c 12 13    # 15: 10113121101
c 11 14    # 16: 011212111211
c 15 16    # 17: target
"""

SITES_TEMPLATED = """\
target 10113121101011212111211
mode templated
m 1
m *
m 0
m 2
m 3
c 1 1        # 6: 11
c 1 2        # 7: 1*
c 7 6        # 8: 1*11
t 8 {1} 3    # 9: 1011
t 8 {1} 4    # 10: 1211
c 9 5        # 11: 10113
c 11 10      # 12: 101131211
c 12 3       # 13: 1011312110
c 13 9       # 14: 10113121101011
c 14 4       # 15: 101131211010112
c 15 10      # 16: 1011312110101121211
c 16 10      # 17: target
"""

SITES_EXTENDED_CANONICAL = """\
target 101131211010112121112111011
mode canonical
m 0
m 1
m 2
m 3
c 1 2      # 5: 01
c 2 1      # 6: 10
c 2 2      # 7: 11
c 2 3      # 8: 12
c 5 5      # 9: 0101
c 6 7      # 10: 1011
c 8 7      # 11: 1211
c 10 4     # 12: 10113
c 8 11     # 13: 121211
c 11 9     # 14: 12110101
c 11 10    # 15: 12111011
c 12 14    # 16: 1011312110101
c 13 15    # 17: 12121112111011
c 16 17    # 18: target
"""

SITES_EXTENDED_TEMPLATED = """\
target 101131211010112121112111011
mode templated
m 1
m *
m 0
m 2
m 3
c 1 1        # 6: 11
c 1 2        # 7: 1*
c 7 6        # 8: 1*11
t 8 {1} 3    # 9: 1011
t 8 {1} 4    # 10: 1211
c 9 5        # 11: 10113
c 11 10      # 12: 101131211
c 12 3       # 13: 1011312110
c 13 9       # 14: 10113121101011
c 14 4       # 15: 101131211010112
c 15 10      # 16: 1011312110101121211
c 16 10      # 17: 10113121101011212111211
c 17 9       # 18: target
"""

# (name, certificate, claimed cost)
REFERENCE_PLANS = (
    ("scaffold-canonical", SCAFFOLD_CANONICAL, 12),
    ("scaffold-templated", SCAFFOLD_TEMPLATED, 11),
    ("sites-canonical", SITES_CANONICAL, 13),
    ("sites-templated", SITES_TEMPLATED, 12),
    ("sites-extended-canonical", SITES_EXTENDED_CANONICAL, 14),
    ("sites-extended-templated", SITES_EXTENDED_TEMPLATED, 13),
)


def single_character_corruptions(certificate: str):
    """Yield every certificate differing from ``certificate`` in one step-line character.

    Only operand characters are mutated: digits become other digits and
    monomer symbols become other symbols of the target alphabet or ``*``.
    """
    lines = certificate.splitlines()
    target = lines[0].split()[1]
    symbols = sorted(set(target)) + ["*"]
    for li in range(2, len(lines)):
        body = lines[li].split("#", 1)[0]
        for ci in range(1, len(body)):
            ch = body[ci]
            if ch.isdigit() and not (lines[li].startswith("m ") and ci == 2):
                alternatives = [d for d in "0123456789" if d != ch]
            elif lines[li].startswith("m ") and ci == 2:
                alternatives = [s for s in symbols if s != ch]
            else:
                continue
            for alt in alternatives:
                mutated = lines[li][:ci] + alt + lines[li][ci + 1:]
                yield "\n".join(lines[:li] + [mutated] + lines[li + 1:]) + "\n"
