import numpy as np

from camlab.metrics import BBox, BOX_VARIANTS, box_mask_records, box_study_table
from camlab.metrics.box_study import box_masks


class TestBoxMasks:

    def test_intersection_and_difference_partition_the_map(self, grid):
        saliency = np.abs(grid((16, 16), 1))
        masks = box_masks(saliency, [BBox(2, 3, 9, 11)])
        assert np.array_equal(masks['B_and_S'] + masks['S_minus_B'], saliency)

    def test_box_and_complement(self):
        masks = box_masks(np.ones((8, 8)), [BBox(1, 1, 2, 2)])
        assert masks['B'].sum() == 4
        assert np.array_equal(masks['B'] + masks['I_minus_B'], np.ones((8, 8)))


class TestBoxRecords:

    def test_full_image_box(self, trained_network, image, grid):
        saliency = np.abs(grid((16, 16), 2))
        records = box_mask_records(trained_network, image, [BBox(0, 0, 15, 15)], saliency, 0)
        assert records['S'] == records['B_and_S']

    def test_box_record_uses_cropped_image(self, trained_network, image):
        box = BBox(4, 4, 11, 11)
        records = box_mask_records(trained_network, image, [box], np.ones((16, 16)), 1, 'x')
        cropped = image * box.indicator((16, 16))[None]
        assert records['B'].masked == trained_network.probabilities(cropped)[1]
        assert set(records) == set(BOX_VARIANTS)

    def test_table_layout(self, trained_network, small_dataset):
        per_image = [box_mask_records(trained_network, small_dataset.images[i], small_dataset.boxes[i],
                                      np.ones((16, 16)), int(small_dataset.labels[i]))
                     for i in range(3)]
        table = box_study_table(per_image)
        assert table['variant'].tolist() == list(BOX_VARIANTS)
        assert list(table.columns) == ['variant', 'AD', 'AG', 'AI']
        # mapa constante: S não altera a imagem
        assert table.loc[0, 'AD'] == 0.0 and table.loc[0, 'AI'] == 0.0
