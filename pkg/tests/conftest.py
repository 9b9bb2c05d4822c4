import numpy as np
import pytest

# first record of the public kddcup.data_10_percent file
KDD_NORMAL_LINE = (
    "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,"
    "1.00,0.00,0.00,9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal."
)

_PROFILES = {
    # label: (protocol, services, flags, src_bytes scale, count scale, serror rate)
    "normal": ("tcp", ("http", "smtp", "ftp_data", "domain_u"), ("SF",), 300.0, 10.0, 0.0),
    "smurf": ("icmp", ("ecr_i",), ("SF",), 1032.0, 500.0, 0.0),
    "neptune": ("tcp", ("private", "telnet", "finger"), ("S0", "REJ"), 0.0, 150.0, 1.0),
    "portsweep": ("tcp", ("private", "other"), ("RSTR", "REJ"), 1.0, 2.0, 0.2),
    "guess_passwd": ("tcp", ("telnet", "pop_3"), ("SF", "RSTO"), 125.0, 1.0, 0.0),
    "buffer_overflow": ("tcp", ("telnet", "ftp"), ("SF",), 1500.0, 1.0, 0.0),
}
_MIX = np.array([0.35, 0.3, 0.2, 0.07, 0.05, 0.03])


def make_kdd_like_lines(n, seed=0):
    """KDD'99-shaped records with class-dependent feature profiles.

    Records come in short same-label runs, like the real capture.
    """
    rng = np.random.default_rng(seed)
    labels = list(_PROFILES)
    lines = []
    while len(lines) < n:
        label = labels[rng.choice(len(labels), p=_MIX)]
        proto, services, flags, sbytes, count, serr = _PROFILES[label]
        for _ in range(int(rng.integers(1, 40))):
            num = np.zeros(38)
            num[0] = rng.exponential(2.0) if label == "normal" else 0.0
            num[1] = abs(rng.normal(sbytes, 0.1 * sbytes + 1))
            num[2] = abs(rng.normal(2000.0, 800.0)) if label == "normal" else 0.0
            num[8] = float(label == "normal" or label == "guess_passwd")
            num[19] = abs(rng.normal(count, 0.1 * count + 1))
            num[20] = num[19]
            num[21] = serr
            num[22] = serr
            num[27] = rng.uniform(0, 1)
            num[28] = abs(rng.normal(count, 5.0))
            num[29] = rng.uniform(0, 255)
            values = [f"{num[0]:.0f}", proto, services[rng.integers(len(services))],
                      flags[rng.integers(len(flags))]]
            values += [f"{v:.2f}" for v in num[1:]]
            lines.append(",".join(values) + f",{label}.")
            if len(lines) == n:
                break
    return lines


@pytest.fixture
def kdd_file(tmp_path):
    def write(n, seed=0, name="kdd.csv"):
        path = tmp_path / name
        path.write_text("\n".join(make_kdd_like_lines(n, seed)) + "\n")
        return path

    return write


def make_blobs(n_per, centers, std=0.3, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, float)
    X = np.vstack([c + rng.normal(scale=std, size=(n_per, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(centers.shape[0]), n_per)
    return X, y


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
