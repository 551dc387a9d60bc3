import numpy as np
import pytest

from nmtrepair.seq2seq import ModelConfig, Seq2SeqModel

# Hand-written methods exercising most of the supported grammar.
JAVA_METHODS = [
    "public int getValue() { return count; }",
    "int f(){return 0;}",
    """
    public static List<String> names(Map<String, Integer> m, int limit) throws IOException {
        List<String> out = new ArrayList<>();
        for (Map.Entry<String, Integer> e : m.entrySet()) {
            if (e.getValue() > limit && !out.contains(e.getKey())) {
                out.add(e.getKey());
            } else if (e.getValue() == null) {
                continue;
            }
        }
        return out;
    }
    """,
    """
    private void close(Reader reader) {
        try {
            reader.close();
        } catch (IOException | RuntimeException ex) {
            log.warn("cannot close", ex);
        } finally {
            reader = null;
        }
    }
    """,
    """
    protected char kind(int code) {
        switch (code) {
            case 0:
                return 'a';
            case 0x1F:
                return '\\n';
            default:
                break;
        }
        return code > 10 ? 'x' : 'y';
    }
    """,
    """
    @Override
    public boolean equals(Object other) {
        // identity first
        if (this == other) return true;
        if (!(other instanceof Point)) return false;
        Point p = (Point) other;
        return x == p.x && y == p.y;
    }
    """,
    """
    double mean(double[] values) {
        double total = 0.0;
        int i = 0;
        do {
            total += values[i++];
        } while (i < values.length);
        return values.length == 0 ? 0.0 : total / values.length;
    }
    """,
    """
    void sort(List<Item> items) {
        items.sort((a, b) -> a.weight - b.weight);
        items.forEach(System.out::println);
        synchronized (lock) { counter++; }
        assert items != null : "no items";
        throw new IllegalStateException("done " + items.size());
    }
    """,
    """
    public Builder withName(final String name) {
        this.name = name == null ? "" : name.trim();
        long mask = 0xFFL << 3;
        float ratio = 1.5e-3f;
        int[][] grid = new int[3][4];
        grid[0][1] = -1;
        return this;
    }
    """,
    """
    String label(int n) {
        String s = "";
        while (n > 0) {
            s = s + (char) ('a' + n % 26);
            n /= 26;
        }
        return s.isEmpty() ? "zero" : s;
    }
    """,
    """
    public void run() {
        outer:
        for (int i = 0; i < 10; i++) {
            for (int j = i; j >= 0; j--) {
                if (grid[i][j] < 0) break outer;
                total += grid[i][j] * weights.get(j);
            }
        }
    }
    """,
    """
    Node find(Node root, int key) {
        Node cur = root;
        while (cur != null && cur.key != key) {
            cur = key < cur.key ? cur.left : cur.right;
        }
        return cur;
    }
    """,
]


def small_config(**kw):
    base = dict(cell_kind="lstm", encoder_layers=1, decoder_layers=1, hidden_units=5,
                embedding_dim=4, vocabulary_size=9, dtype="float64", init_scale=0.5)
    base.update(kw)
    return ModelConfig(**base)


def small_model(seed=0, **kw):
    return Seq2SeqModel(small_config(**kw), seed=seed)


def random_batch(rng, vocab_size, batch=3, max_src=5, max_tgt=4):
    """Padded random batch in the layout expected by loss_and_grads."""
    from nmtrepair.seq2seq import make_batch

    pairs = []
    for _ in range(batch):
        src = rng.integers(3, vocab_size, rng.integers(1, max_src + 1)).tolist()
        tgt = rng.integers(3, vocab_size, rng.integers(1, max_tgt + 1)).tolist()
        pairs.append((src, tgt))
    return pairs, make_batch(pairs)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def synthetic_pairs():
    from nmtrepair.dataset import generate_synthetic_corpus

    return generate_synthetic_corpus(300, seed=11)


def numeric_grad_errors(model, arrays, rng, per_param=8, eps=1e-4):
    """Relative error between analytic and central-difference gradients.

    A few entries of every parameter are probed; the error for a group is
    ||analytic - numeric|| / max(||analytic|| + ||numeric||, 1e-12) over
    those entries, so tiny individual gradients do not dominate.
    """
    _, grads = model.loss_and_grads(*arrays)
    errors = {}
    for group, names in model.groups().items():
        ana, num = [], []
        for name in names:
            p = model.params[name]
            flat = p.reshape(-1)
            idx = rng.choice(flat.size, size=min(per_param, flat.size), replace=False)
            for i in idx:
                old = flat[i]
                flat[i] = old + eps
                up, _ = model.loss_and_grads(*arrays, need_grads=False)
                flat[i] = old - eps
                down, _ = model.loss_and_grads(*arrays, need_grads=False)
                flat[i] = old
                num.append((up - down) / (2 * eps))
                ana.append(grads[name].reshape(-1)[i])
        ana, num = np.array(ana), np.array(num)
        errors[group] = float(np.linalg.norm(ana - num) / max(np.linalg.norm(ana) + np.linalg.norm(num), 1e-12))
    return errors


TINY_TRAIN_CONFIG = {"hidden_units": 8, "embedding_dim": 8, "decoder_layers": 1, "optimizer": "adam",
                     "learning_rate": 0.01, "dtype": "float64"}


def run_pipeline(workdir, pairs=60, epochs=2, beams="1,3"):
    """Run synth -> mine -> extract -> dataset build -> train -> evaluate via the CLI.

    Paths are relative to ``workdir`` so manifests do not depend on where it lives.
    """
    import json
    import os

    from nmtrepair.cli import main

    old = os.getcwd()
    os.chdir(workdir)
    try:
        with open("model.json", "w") as fh:
            json.dump(TINY_TRAIN_CONFIG, fh)
        steps = [
            ["synth", "--pairs", str(pairs), "--seed", "5", "--out", "synth"],
            ["mine", "--roots", "synth/corpus", "--jobs", "2", "--out", "mined"],
            ["extract", "--in", "mined", "--out", "methods"],
            ["dataset", "build", "--in", "methods", "--seed", "9", "--out", "bundle"],
            ["train", "--bundle", "bundle", "--config", "model.json", "--max-epochs", str(epochs),
             "--seed", "3", "--out", "model"],
            ["evaluate", "--model", "model/model.ckpt", "--bundle", "bundle", "--beams", beams,
             "--max-len", "40", "--out", "eval/report.csv"],
        ]
        for argv in steps:
            code = main(argv)
            if code != 0:
                raise AssertionError(f"{argv[0]} exited with {code}")
    finally:
        os.chdir(old)


# -- acceptance reporting -------------------------------------------------------------

CRITERIA_RESULTS = {}


class Criterion:
    """Context manager recording one acceptance criterion as PASS or FAIL."""

    def __init__(self, number, title):
        self.number, self.title, self.details = number, title, []

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "FAIL" if exc_type else "PASS"
        detail = "; ".join(self.details + ([f"{exc_type.__name__}: {exc}"] if exc_type else []))
        CRITERIA_RESULTS[self.number] = f"criterion {self.number:>2} {status}: {self.title}" + (
            f" ({detail})" if detail else "")
        print(CRITERIA_RESULTS[self.number])
        return False


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA_RESULTS):
            terminalreporter.write_line(CRITERIA_RESULTS[n])
