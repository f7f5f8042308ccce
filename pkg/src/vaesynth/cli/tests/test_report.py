import unittest

from vaesynth.cli.report import TableFormatter, format_report


def artifacts():
    summary = {"final": {"epoch": 2, "total": 0.05, "reconstruction": 0.04, "weight_decay": 0.01, "kld": 3.5},
               "param_sum_square": 12.5, "test_loss": {"reconstruction": 0.04, "kld": 3.0, "total": 3.04}}
    gen = {"classes": {"a": {"originals": 3, "synthetics": 27}}}
    latent = {"method": "pca", "separation_latent": 0.5, "separation_projection": 0.4}
    metrics = {"metrics": {"accuracy": 0.9, "macro_precision": 0.9, "macro_recall": 0.9, "macro_f1": 0.9,
                           "classes": {"a": {"precision": 1.0, "recall": 0.8, "f1": 0.888888889, "support": 5}}}}
    return summary, gen, gen, latent, metrics


class TestTableFormatter(unittest.TestCase):

    def test_table(self):
        fmt = TableFormatter({"class": "Class", "f1": "F1"})
        text = fmt.table([{"class": "clean", "f1": 0.5}, {"class": "cross-long", "f1": None}])
        self.assertEqual("| Class      | F1  |\n"
                         "| ---------- | --- |\n"
                         "| clean      | 0.5 |\n"
                         "| cross-long | n/a |", text)


class TestFormatReport(unittest.TestCase):

    def test_sections(self):
        text = format_report(*artifacts())
        for heading in ("## Training", "## Generated datasets", "## Latent space", "## Classifier"):
            self.assertIn(heading, text)
        self.assertIn("Test accuracy: 0.9", text)
        self.assertIn("| vae      | a     | 3         | 27         | 30    |", text)
        self.assertNotIn("Traditional", text)

    def test_comparison(self):
        comparison = {"traditional": {"final_total": 5.0, "test_total": None, "separation": 0.7},
                      "proposed": {"final_total": 0.1, "test_total": None, "separation": 0.4}}
        self.assertIn("## Traditional versus proposed loss", format_report(*artifacts(), comparison))

    def test_deterministic(self):
        self.assertEqual(format_report(*artifacts()), format_report(*artifacts()))


if __name__ == '__main__':
    unittest.main()
