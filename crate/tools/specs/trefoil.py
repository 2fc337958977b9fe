COMMENT = "right-handed trefoil with maximal Thurston-Bennequin number, drawn as the resolution of its standard front (three middle crossings, two right-cusp loops)"
COMPONENTS = {"K": [(-1, 2), (0, 3), (9, 3), (11, 1.2), (12, 2), (11, 2.8), (9, 1), (8, 1), (6, -1), (4, 1), (2, -1), (0, -1),
                    (-1, -2), (0, -3), (9, -3), (11, -1.2), (12, -2), (11, -2.8), (9, -1), (8, -1), (6, 1), (4, -1), (2, 1), (0, 1)]}
NAMES = ["a1", "b3", "b2", "b1", "a2"]
SELECT = lambda r: r["writhe"] == 1
