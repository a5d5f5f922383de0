import io

import pytest

from risa.runner import LOSS_LOG_COLUMNS, LossRecord, TrainConfig, read_loss_log, train, weighted_total
from risa.runner.loss_log import write_header, write_record


def test_weighted_total():
    config = TrainConfig(lambda1=10.0, lambda2=2.0, lambda3=3.0)
    record = LossRecord.from_components(1, config, 1.0, 0.5, 0.25, 0.125)
    assert record.total == pytest.approx(1.0 + 5.0 + 0.5 + 0.375)
    assert weighted_total(config, 1.0, 0.5, 0.25, 0.125) == record.total


def test_row_format():
    record = LossRecord(epoch=2, l_vae_part=0.1, l_vae_global=1.0, l_trip_part=0.0, l_trip_global=1e-20, total=1.1)
    assert record.as_row() == ["2", "0.10000000000000001", "1", "0", "9.9999999999999995e-21", "1.1000000000000001"]


def test_write(tmp_path):
    stream = io.StringIO()
    write_header(stream)
    write_record(stream, LossRecord(epoch=1, l_vae_part=1, l_vae_global=2, l_trip_part=3, l_trip_global=4, total=5))
    assert stream.getvalue() == ",".join(LOSS_LOG_COLUMNS) + "\n1,1,2,3,4,5\n"


def test_logged_totals(tmp_path, toy_features, small_config):
    config = TrainConfig(lr=1e-3, gamma=1.0, lambda1=2.0, lambda2=3.0, lambda3=4.0, epochs=3, patience=0)
    result = train(toy_features, small_config, config)
    path = tmp_path / "loss_log.csv"
    with path.open("w", newline="") as fd:
        write_header(fd)
        for record in result.records:
            write_record(fd, record)
    records = read_loss_log(path)
    # Values survive the text round trip exactly
    assert records == result.records
    for record in records:
        recomputed = weighted_total(
            config, record.l_vae_part, record.l_vae_global, record.l_trip_part, record.l_trip_global
        )
        assert abs(recomputed - record.total) <= 1e-9
