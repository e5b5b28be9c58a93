import tempfile
from pathlib import Path

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.config import ModelConfig
from core.exceptions import CheckpointError
from numerics.parameters import Parameters, init_parameters
from numerics.serialization import MAGIC, read_container, write_container


@pytest.mark.unit
class ContainerTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.config = ModelConfig(d_model=8, d_ff=16, heads=2, graph_heads=2, encoder_layers=1,
                                  graph_layers=1, decoder_layers=1, max_distance=4)
        self.params = init_parameters(self.config, 11, 3, np.random.default_rng(0))

    def path(self, name):
        return Path(self.tmp.name) / name

    def test_save_load_save_is_byte_identical(self):
        header = [("d_model", "8"), ("relations", "nsubj,dobj,det")]
        write_container(self.path("a.ckpt"), header, self.params.arrays())
        loaded_header, records = read_container(self.path("a.ckpt"))
        write_container(self.path("b.ckpt"), loaded_header.items(), records)
        self.assertEqual(self.path("a.ckpt").read_bytes(), self.path("b.ckpt").read_bytes())
        self.assertEqual(loaded_header["relations"], "nsubj,dobj,det")

    def test_records_keep_order_shape_and_bits(self):
        write_container(self.path("a.ckpt"), [], self.params.arrays())
        _, records = read_container(self.path("a.ckpt"))
        self.assertEqual([name for name, _ in records], self.params.names())
        for name, array in records:
            self.assertEqual(array.tobytes(), self.params[name].data.tobytes())

    def test_bad_magic_and_truncation_are_reported(self):
        self.path("bad.ckpt").write_bytes(b"NOPE" + bytes(8))
        with self.assertRaises(CheckpointError):
            read_container(self.path("bad.ckpt"))
        write_container(self.path("a.ckpt"), [], self.params.arrays())
        data = self.path("a.ckpt").read_bytes()
        self.assertTrue(data.startswith(MAGIC))
        self.path("short.ckpt").write_bytes(data[:-3])
        with self.assertRaises(CheckpointError):
            read_container(self.path("short.ckpt"))


@pytest.mark.unit
class ParameterNamingTests(SimpleTestCase):
    def test_expected_names_and_shapes(self):
        config = ModelConfig(d_model=8, d_ff=16, heads=2, graph_heads=2, encoder_layers=1,
                             graph_layers=2, decoder_layers=1, max_distance=4)
        params = init_parameters(config, 11, 3, np.random.default_rng(0))
        self.assertEqual(params["graph.layer1.W_out"].shape, (24, 8))
        self.assertEqual(params["graph.relations.embedding"].shape, (4, 8))
        self.assertEqual(params["graph.layer0.head1.W_k"].shape, (8, 4))
        self.assertEqual(params["treecorr.relation.W"].shape, (4, 8))
        self.assertEqual(params["treecorr.distance.W"].shape, (5, 8))
        self.assertEqual(params["treecorr.ancestor.W"].shape, (3, 8))
        self.assertEqual(params["generator.W"].shape, (8, 11))
        self.assertIn("treecorr.mlp.W", params)

    def test_unshared_treecorr_mlps(self):
        config = ModelConfig(d_model=8, d_ff=16, heads=2, graph_heads=2, encoder_layers=1, graph_layers=1,
                             decoder_layers=1, share_treecorr_mlp=False)
        params = init_parameters(config, 11, 3, np.random.default_rng(0))
        self.assertIn("treecorr.distance.mlp.W", params)
        self.assertNotIn("treecorr.mlp.W", params)

    def test_duplicate_names_are_rejected(self):
        params = Parameters({"a": np.zeros(2, dtype=np.float32)})
        with self.assertRaises(CheckpointError):
            params.add("a", np.zeros(2, dtype=np.float32))
