// Calibrated construction constants for the 20-node mAbs ground-truth
// network. The association classes fix which edges exist and their relative
// ordering; the share parameters below pin the resulting full-graph
// criticality profile of X20 and the per-node residual fractions on the
// standardized (unit-marginal) scale. See build_mabs_network for how they are
// consumed.
#include "bnsv/detail/mabs_table.hpp"

namespace bnsv::detail {

// Criticality of each CPP slot on X20 (fractions of Var(X20)); the relative
// weights of a unit's CPPs derive from these.
const std::array<std::pair<int, double>, 10> kMabsCppCriticality = {{
    {0, 0.0467},   // X1
    {1, 0.0070},   // X2
    {2, 0.0238},   // X3
    {3, 0.5830},   // X4
    {7, 0.0045},   // X8
    {8, 0.0216},   // X9
    {11, 0.0150},   // X12
    {12, 0.2490},   // X13
    {16, 0.0104},   // X17
    {17, 0.0366},   // X18
}};

// Residual fraction of each CQA's unit-scale marginal variance.
const std::array<std::pair<int, double>, 10> kMabsResidualShare = {{
    {4, 0.0016},   // X5
    {5, 0.0016},   // X6
    {6, 0.0016},   // X7
    {9, 0.0007},   // X10
    {10, 0.0007},   // X11
    {13, 0.00065},   // X14
    {14, 0.00065},   // X15
    {15, 0.00065},   // X16
    {18, 0.0005},   // X19
    {19, 0.0005},   // X20
}};

// CPP-block variance share of each downstream child.
const double kMabsCppShareCentrifuge = 0.03792502380377831;
const double kMabsCppShareChromatography = 0.27731983704463337;
const double kMabsCppShareX19 = 0.055;
const double kMabsCppShareX20 = 0.047008219144131114;

// Carry weight of the bioburden CQA relative to the impurity/protein carriers
// entering the centrifuge.
const double kMabsBioburdenCarry = 0.6;

}  // namespace bnsv::detail
