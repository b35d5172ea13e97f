#ifndef PLATDIFF_ERRORS_HPP
#define PLATDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace platdiff {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define PLATDIFF_DEFINE_ERROR(Name)              \
  struct Name : Error {                          \
    using Error::Error;                          \
  }

PLATDIFF_DEFINE_ERROR(NonPositivePotential);
PLATDIFF_DEFINE_ERROR(DegeneratePotential);
PLATDIFF_DEFINE_ERROR(DimensionMismatch);
PLATDIFF_DEFINE_ERROR(NumericalBlowup);
PLATDIFF_DEFINE_ERROR(MissingColumn);
PLATDIFF_DEFINE_ERROR(WindowViolation);
PLATDIFF_DEFINE_ERROR(NonMonotoneCumulative);
PLATDIFF_DEFINE_ERROR(DegenerateSeries);
PLATDIFF_DEFINE_ERROR(ExplosiveTrajectory);
PLATDIFF_DEFINE_ERROR(ChainDiverged);
PLATDIFF_DEFINE_ERROR(PriorMisconfiguration);
PLATDIFF_DEFINE_ERROR(RankDeficientDesign);
PLATDIFF_DEFINE_ERROR(NonFiniteDeviance);
PLATDIFF_DEFINE_ERROR(UnknownVariant);
PLATDIFF_DEFINE_ERROR(InsufficientDraws);
PLATDIFF_DEFINE_ERROR(HorizonMismatch);
PLATDIFF_DEFINE_ERROR(MissingArchive);
PLATDIFF_DEFINE_ERROR(NonStationaryDraw);

#undef PLATDIFF_DEFINE_ERROR

}  // namespace platdiff

#endif  // PLATDIFF_ERRORS_HPP
