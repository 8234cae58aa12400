"""Bridge acceptance: attacks through the served model must be
indistinguishable, query by query, from attacks on the in-process model.
"""

import sys

import numpy as np
import pytest

colorshift = pytest.importorskip("colorshift")


class RecordingClassifier:
    def __init__(self, inner):
        self.inner = inner
        self.labels = []

    @property
    def num_classes(self):
        return self.inner.num_classes

    thread_safe = True

    def predict(self, X):
        out = self.inner.predict(X)
        self.labels.extend(int(v) for v in out)
        return out


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    train = colorshift.generate_shape_dataset(25, 8, seed=21)
    model = colorshift.MlpClassifier(hidden_units=16, epochs=10, seed=5)
    model.fit(train.images, train.labels)
    path = tmp_path_factory.mktemp("model") / "mlp.bin"
    model.save(path)
    return path


def test_bridge_attack_is_query_identical_to_in_process(checkpoint):
    local = RecordingClassifier(colorshift.MlpClassifier.load(checkpoint))
    remote_client = colorshift.RemoteClassifier.spawn(
        [sys.executable, "-m", "modelbridge", "--mlp", str(checkpoint)])
    remote = RecordingClassifier(remote_client)
    try:
        assert remote.num_classes == local.num_classes

        rng = np.random.default_rng(17)
        images = rng.uniform(0, 1, (50, 8, 8, 3))
        mismatches = 0
        for i, img in enumerate(images):
            local_before, remote_before = len(local.labels), len(remote.labels)
            # quantize so both sides classify exactly the 8-bit image the
            # wire protocol carries
            a = colorshift.run_attack(img, local, trials=15, seed=3, image_index=i,
                                      quantize=True)
            b = colorshift.run_attack(img, remote, trials=15, seed=3, image_index=i,
                                      quantize=True)
            if local.labels[local_before:] != remote.labels[remote_before:]:
                mismatches += 1
            assert (a.success, a.trial_index, a.shift, a.original_label, a.final_label) == \
                   (b.success, b.trial_index, b.shift, b.original_label, b.final_label)
        ok = mismatches == 0 and len(local.labels) == len(remote.labels)
        print(f"{'PASS' if ok else 'FAIL'}: bridge differential: every trial label "
              f"identical across 50 images ({len(local.labels)} queries)")
        assert ok
    finally:
        remote_client.close()
