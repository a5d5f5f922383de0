import csv
import pathlib
from typing import IO, List, Union

import attr

from .config import TrainConfig

LOSS_LOG_COLUMNS = ("epoch", "l_vae_part", "l_vae_global", "l_trip_part", "l_trip_global", "total")


@attr.s(slots=True, frozen=True)  # pragma: no mutate
class LossRecord:
    """Epoch means of the raw loss components and their weighted total."""

    epoch: int = attr.ib()  # pragma: no mutate
    l_vae_part: float = attr.ib()  # pragma: no mutate
    l_vae_global: float = attr.ib()  # pragma: no mutate
    l_trip_part: float = attr.ib()  # pragma: no mutate
    l_trip_global: float = attr.ib()  # pragma: no mutate
    total: float = attr.ib()  # pragma: no mutate

    @classmethod
    def from_components(
        cls, epoch: int, config: TrainConfig, vae_part: float, vae_global: float, trip_part: float, trip_global: float
    ) -> "LossRecord":
        return cls(
            epoch=epoch,
            l_vae_part=vae_part,
            l_vae_global=vae_global,
            l_trip_part=trip_part,
            l_trip_global=trip_global,
            total=weighted_total(config, vae_part, vae_global, trip_part, trip_global),
        )

    def as_row(self) -> List[str]:
        values = (self.l_vae_part, self.l_vae_global, self.l_trip_part, self.l_trip_global, self.total)
        return [str(self.epoch)] + [f"{value:.17g}" for value in values]


def weighted_total(
    config: TrainConfig, vae_part: float, vae_global: float, trip_part: float, trip_global: float
) -> float:
    return vae_part + config.lambda1 * vae_global + config.lambda2 * trip_part + config.lambda3 * trip_global


def write_header(stream: IO[str]) -> None:
    csv.writer(stream, lineterminator="\n").writerow(LOSS_LOG_COLUMNS)


def write_record(stream: IO[str], record: LossRecord) -> None:
    csv.writer(stream, lineterminator="\n").writerow(record.as_row())


def read_loss_log(path: Union[str, pathlib.Path]) -> List[LossRecord]:
    with open(path, newline="", encoding="utf-8") as fd:
        reader = csv.DictReader(fd)
        return [
            LossRecord(
                epoch=int(row["epoch"]),
                l_vae_part=float(row["l_vae_part"]),
                l_vae_global=float(row["l_vae_global"]),
                l_trip_part=float(row["l_trip_part"]),
                l_trip_global=float(row["l_trip_global"]),
                total=float(row["total"]),
            )
            for row in reader
        ]
