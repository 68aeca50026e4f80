"""Published benchmark values for the angular Kerr-Newman Dirac eigenvalues.

All intervals are (lower, upper).  Eigenvalue indices follow the ordering
... < lambda_-1 < 0 <= lambda_1 < lambda_2 < ...

``APRIORI`` holds analytic ("analytic") and h=0.001 basic-rule ("numeric")
enclosures of lambda_-1, lambda_1, lambda_2, lambda_3 for two coupling
sets.  ``SHARPENED`` holds the sharpened enclosures of lambda_1 and
lambda_2 derived from them.  ``LAMBDA_MINUS1`` holds series-expansion
predictions of |lambda_-1(+-3/2, am, aw)| with their h=0.001 basic-rule
enclosures, indexed by (kappa, aw, m/w); am = (m/w) * aw.
"""
from __future__ import annotations

from pathlib import Path

from .enclosure import AprioriSegment, load_apriori, write_apriori

DATA_DIR = Path(__file__).parent / "data" / "apriori"

INDICES = (-1, 1, 2, 3)
COUPLINGS = ((0.005, 0.015), (0.25, 0.75))
KAPPAS = (-4.5, -3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5, 4.5)

# (am, aw) -> label -> kappa -> four intervals for n = -1, 1, 2, 3
APRIORI = {
    (0.005, 0.015): {
        "analytic": {
            -4.5: ((-4.99299, -4.97997), (4.97997, 4.99299), (5.98248, 5.99500), (6.98427, 6.99643)),
            -3.5: ((-3.99374, -3.97997), (3.97997, 3.99374), (4.98298, 4.99600), (5.98499, 5.99750)),
            -2.5: ((-2.99499, -2.97996), (2.97996, 2.99499), (3.98373, 3.99750), (4.98599, 4.99900)),
            -1.5: ((-1.99749, -1.97994), (1.97994, 1.99749), (2.98498, 3.00000), (3.98749, 4.00125)),
            -0.5: ((-1.00500, -0.97988), (0.97988, 1.00500), (1.98748, 2.00500), (2.98999, 3.00500)),
            0.5: ((-1.01990, -0.99500), (0.99500, 1.01990), (1.99500, 2.01249), (2.99500, 3.01000)),
            1.5: ((-2.01995, -2.00248), (2.00248, 2.01995), (2.99999, 3.01499), (3.99874, 4.01250)),
            2.5: ((-3.01997, -3.00498), (3.00498, 3.01997), (4.00249, 4.01624), (5.00099, 5.01400)),
            3.5: ((-4.01998, -4.00623), (4.00623, 4.01998), (5.00399, 5.01699), (6.00249, 6.01500)),
            4.5: ((-5.01998, -5.00698), (5.00698, 5.01998), (6.00499, 6.01749), (7.00356, 7.01571)),
        },
        "numeric": {
            -4.5: ((-4.98817, -4.98547), (4.98456, 4.98727), (5.98497, 5.99176), (6.98395, 6.99622)),
            -3.5: ((-3.98833, -3.98611), (3.98500, 3.98723), (4.98620, 4.99190), (5.98570, 5.99621)),
            -2.5: ((-2.98874, -2.98698), (2.98555, 2.98731), (3.98776, 3.99242), (4.98778, 4.99659)),
            -1.5: ((-1.98990, -1.98812), (1.98612, 1.98789), (2.98971, 2.99404), (3.99005, 3.99808)),
            -0.5: ((-1.17342, -0.81076), (0.80779, 1.16967), (1.74245, 2.25132), (2.68941, 3.30912)),
            0.5: ((-1.18847, -0.82905), (0.83197, 1.19218), (1.75063, 2.26051), (2.69440, 3.31501)),
            1.5: ((-2.01189, -2.01013), (2.01212, 2.01389), (3.00600, 3.01032), (4.00196, 4.00998)),
            2.5: ((-3.01303, -3.01127), (3.01270, 3.01446), (4.00760, 4.01226), (5.00343, 5.01225)),
            3.5: ((-4.01389, -4.01167), (4.01278, 4.01500), (5.00812, 5.01382), (6.00381, 6.01432)),
            4.5: ((-5.01454, -5.01183), (5.01274, 5.01545), (6.00825, 6.01504), (7.00379, 7.01607)),
        },
    },
    (0.25, 0.75): {
        "analytic": {
            -4.5: ((-4.61607, -3.93330), (3.93330, 4.61607), (5.08853, 5.73293), (6.19204, 6.81221)),
            -3.5: ((-3.65037, -2.91227), (2.91227, 3.65037), (4.10889, 4.78460), (5.22722, 5.86806)),
            -2.5: ((-2.71222, -1.87132), (1.87132, 2.71222), (3.14116, 3.86421), (4.27769, 4.94708)),
            -1.5: ((-1.85079, -0.75000), (0.75000, 1.85079), (2.19948, 3.00000), (3.35555, 4.06609)),
            -0.5: ((-1.28078, -0.25000), (0.25000, 1.28078), (1.33113, 2.26557), (2.48861, 3.26040)),
            0.5: ((-1.85079, -0.75000), (0.75000, 1.85079), (1.75000, 2.60850), (2.75000, 3.50000)),
            1.5: ((-2.90754, -2.09520), (2.09520, 2.90754), (2.99037, 3.72312), (3.93330, 4.61607)),
            2.5: ((-3.93274, -3.21410), (3.21410, 3.93274), (4.10889, 4.784591), (5.04150, 5.68715)),
            3.5: ((-4.94708, -4.27769), (4.27769, 4.94708), (5.18139, 5.82338), (6.11396, 6.73557)),
            4.5: ((-5.95636, -5.31776), (5.31776, 5.95636), (6.23074, 6.85020), (7.16619, 7.77081)),
        },
        "numeric": {
            -4.5: ((-4.35071, -4.34800), (4.29622, 4.29891), (5.42561, 5.43238), (6.51143, 6.52368)),
            -3.5: ((-3.37482, -3.37259), (3.30759, 3.30981), (4.46547, 4.47115), (5.56039, 5.57087)),
            -2.5: ((-2.41438, -2.41258), (2.32570, 2.32746), (3.52756, 3.53220), (4.63012, 4.63890)),
            -1.5: ((-1.49000, -1.48796), (1.35885, 1.36075), (2.63770, 2.64203), (3.73691, 3.74491)),
            -0.5: ((-0.90569, -0.44078), (0.22804, 0.65248), (1.65046, 2.12229), (2.62846, 3.22283)),
            0.5: ((-1.62848, -1.32502), (1.42913, 1.76746), (2.02453, 2.55401), (2.87169, 3.51065)),
            1.5: ((-2.57743, -2.57578), (2.65566, 2.65737), (3.43822, 3.44251), (4.32596, 4.33398)),
            2.5: ((-3.62304, -3.62132), (3.68142, 3.68315), (4.51313, 4.51774), (5.40876, 5.41754)),
            3.5: ((-4.64965, -4.64746), (4.69575, 4.69794), (5.55791, 5.56358), (6.46318, 6.47365)),
            4.5: ((-5.66717, -5.66448), (5.70488, 5.70757), (6.58784, 6.59460), (7.50180, 7.51404)),
        },
    },
}

# (am, aw) -> kappa -> {(label, n): interval} for n = 1, 2
SHARPENED = {
    (0.005, 0.015): {
        -4.5: {("analytic", 1): (4.98590, 4.98592), ("numeric", 1): (4.98590, 4.98592),
               ("analytic", 2): (5.98834, 5.98838), ("numeric", 2): (5.98834, 5.98838)},
        -3.5: {("analytic", 1): (3.98611, 3.98612), ("numeric", 1): (3.98611, 3.98612),
               ("analytic", 2): (4.98903, 4.98906), ("numeric", 2): (4.98903, 4.98906)},
        -2.5: {("analytic", 1): (2.98642, 2.98644), ("numeric", 1): (2.98642, 2.98644),
               ("analytic", 2): (3.99008, 3.99010), ("numeric", 2): (3.99008, 3.99010)},
        -1.5: {("analytic", 1): (1.98700, 1.98701), ("numeric", 1): (1.98700, 1.98701),
               ("analytic", 2): (2.99186, 2.99188), ("numeric", 2): (2.99186, 2.99188)},
        -0.5: {("analytic", 1): (0.95595, 1.00537), ("numeric", 1): (0.94529, 1.00693),
               ("analytic", 2): (1.93169, 2.06215), ("numeric", 2): (1.90340, 2.07515)},
        0.5: {("analytic", 1): (0.97907, 1.02824), ("numeric", 1): (0.96816, 1.02970),
              ("analytic", 2): (1.93988, 2.07151), ("numeric", 2): (1.91121, 2.08548)},
        1.5: {("analytic", 1): (2.01300, 2.01301), ("numeric", 1): (2.01300, 2.01301),
              ("analytic", 2): (3.00815, 3.00817), ("numeric", 2): (3.00815, 3.00817)},
        2.5: {("analytic", 1): (3.01357, 3.01358), ("numeric", 1): (3.01357, 3.01358),
              ("analytic", 2): (4.00992, 4.00994), ("numeric", 2): (4.00992, 4.00994)},
        3.5: {("analytic", 1): (4.01388, 4.01390), ("numeric", 1): (4.01388, 4.01390),
              ("analytic", 2): (5.01095, 5.01098), ("numeric", 2): (5.01095, 5.01098)},
        4.5: {("analytic", 1): (5.01408, 5.01410), ("numeric", 1): (5.01408, 5.01410),
              ("analytic", 2): (6.01163, 6.01166), ("numeric", 2): (6.01163, 6.01166)},
    },
    (0.25, 0.75): {
        -4.5: {("analytic", 1): (4.29755, 4.29757), ("numeric", 1): (4.29756, 4.29757),
               ("analytic", 2): (5.42898, 5.42902), ("numeric", 2): (5.42898, 5.42901)},
        -3.5: {("analytic", 1): (3.30869, 3.30870), ("numeric", 1): (3.30869, 3.30870),
               ("analytic", 2): (4.46829, 4.46832), ("numeric", 2): (4.46830, 4.46832)},
        -2.5: {("analytic", 1): (2.32657, 2.32658), ("numeric", 1): (2.32657, 2.32658),
               ("analytic", 2): (3.52986, 3.52989), ("numeric", 2): (3.52987, 3.52989)},
        -1.5: {("analytic", 1): (1.35979, 1.35980), ("numeric", 1): (1.35979, 1.35980),
               ("analytic", 2): (2.63985, 2.63987), ("numeric", 2): (2.63985, 2.63987)},
        -0.5: {("analytic", 1): (0.38970, 0.54256), ("numeric", 1): (0.40304, 0.49138),
               ("analytic", 2): (1.79396, 1.79828), ("numeric", 2): (1.81137, 1.93148)},
        0.5: {("analytic", 1): (1.40966, 1.61048), ("numeric", 1): (1.53115, 1.60808),
              ("analytic", 2): (2.13715, 2.44911), ("numeric", 2): (2.16893, 2.42358)},
        1.5: {("analytic", 1): (2.65650, 2.65651), ("numeric", 1): (2.65650, 2.65651),
              ("analytic", 2): (3.44035, 3.44038), ("numeric", 2): (3.44035, 3.44037)},
        2.5: {("analytic", 1): (3.68228, 3.68229), ("numeric", 1): (3.68228, 3.68229),
              ("analytic", 2): (4.51542, 4.51545), ("numeric", 2): (4.51542, 4.51544)},
        3.5: {("analytic", 1): (4.69684, 4.69685), ("numeric", 1): (4.69684, 4.69685),
              ("analytic", 2): (5.56072, 5.56076), ("numeric", 2): (5.56073, 5.56075)},
        4.5: {("analytic", 1): (5.70621, 5.70623), ("numeric", 1): (5.70621, 5.70623),
              ("analytic", 2): (6.59119, 6.59124), ("numeric", 2): (6.59120, 6.59123)},
    },
}

MASS_RATIOS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

# (kappa, aw) -> six (prediction, (lower, upper)) entries, one per m/w in MASS_RATIOS
LAMBDA_MINUS1 = {
    (1.5, 0.1): ((2.080309, (2.080123, 2.080500)), (2.076445, (2.076260, 2.076638)),
                 (2.072607, (2.072423, 2.072800)), (2.068795, (2.068610, 2.068988)),
                 (2.065008, (2.064823, 2.065200)), (2.061246, (2.061061, 2.061438))),
    (1.5, 0.2): ((2.161189, (2.161027, 2.161402)), (2.153720, (2.153563, 2.153939)),
                 (2.146351, (2.146199, 2.146573)), (2.139083, (2.138933, 2.139305)),
                 (2.131917, (2.131764, 2.132137)), (2.124853, (2.124694, 2.125067))),
    (1.5, 0.3): ((2.242573, (2.242476, 2.242851)), (2.231734, (2.231655, 2.232029)),
                 (2.221119, (2.221049, 2.221425)), (2.210730, (2.210663, 2.211035)),
                 (2.200569, (2.200494, 2.200863)), (2.190635, (2.190540, 2.190910))),
    (1.5, 1.0): ((2.820892, (2.824551, 2.824924)), (2.791662, (2.795767, 2.796140)),
                 (2.764958, (2.769101, 2.769476)), (2.740745, (2.744523, 2.744894)),
                 (2.718899, (2.721971, 2.722345)), (2.699206, (2.701374, 2.701750))),
    (-1.5, 0.1): ((1.920331, (1.920141, 1.920516)), (1.924477, (1.924287, 1.924659)),
                  (1.928648, (1.928457, 1.928830)), (1.932845, (1.932653, 1.933027)),
                  (1.937067, (1.936876, 1.937249)), (1.941315, (1.941125, 1.941497))),
    (-1.5, 0.2): ((1.841373, (1.841163, 1.841536)), (1.849972, (1.849755, 1.850129)),
                  (1.858676, (1.858454, 1.858828)), (1.867484, (1.867259, 1.867632)),
                  (1.876395, (1.876170, 1.876543)), (1.885406, (1.885185, 1.885559))),
    (-1.5, 0.3): ((1.763193, (1.762931, 1.763306)), (1.776584, (1.776299, 1.776673)),
                  (1.790217, (1.789910, 1.790285)), (1.804084, (1.803765, 1.804140)),
                  (1.818181, (1.817859, 1.818236)), (1.832498, (1.832192, 1.832569))),
}


def apriori_segments(kappa: float, am: float, aw: float, label: str = "analytic"):
    """Published a-priori segments for lambda_-1, lambda_1, lambda_2, lambda_3."""
    rows = APRIORI[(am, aw)][label][kappa]
    return [AprioriSegment(a, b, label) for a, b in rows]


def apriori_filename(kappa: float, am: float, aw: float, label: str) -> str:
    return f"am{am:g}_aw{aw:g}_kappa{kappa:+g}_{label}.txt"


def apriori_path(kappa: float, am: float, aw: float, label: str = "analytic") -> Path:
    return DATA_DIR / apriori_filename(kappa, am, aw, label)


def load_shipped_apriori(kappa: float, am: float, aw: float, label: str = "analytic"):
    return load_apriori(apriori_path(kappa, am, aw, label))


def write_apriori_files(directory=DATA_DIR) -> list:
    """Regenerate one segment file per (coupling, kappa, label)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for (am, aw), by_label in APRIORI.items():
        for label, by_kappa in by_label.items():
            for kappa in by_kappa:
                path = directory / apriori_filename(kappa, am, aw, label)
                header = (f"kappa={kappa:g} am={am:g} aw={aw:g} ({label} bounds)\n"
                          f"rows enclose lambda_n for n = {', '.join(map(str, INDICES))}")
                with open(path, "w", encoding="utf-8") as fh:
                    write_apriori(apriori_segments(kappa, am, aw, label), fh, header)
                written.append(path)
    return written
