#ifndef BNSV_DETAIL_MABS_TABLE_HPP
#define BNSV_DETAIL_MABS_TABLE_HPP

#include <array>
#include <utility>

namespace bnsv::detail {

extern const std::array<std::pair<int, double>, 10> kMabsCppCriticality;
extern const std::array<std::pair<int, double>, 10> kMabsResidualShare;
extern const double kMabsCppShareCentrifuge;
extern const double kMabsCppShareChromatography;
extern const double kMabsCppShareX19;
extern const double kMabsCppShareX20;
extern const double kMabsBioburdenCarry;

}  // namespace bnsv::detail

#endif
