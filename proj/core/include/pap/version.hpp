#ifndef PAP_VERSION_HPP
#define PAP_VERSION_HPP

namespace pap {

inline constexpr const char* version = "0.1.0";

}

#endif
