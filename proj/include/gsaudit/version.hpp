#ifndef GSAUDIT_VERSION_HPP
#define GSAUDIT_VERSION_HPP

namespace gsaudit {

inline constexpr const char* version = "0.1.0";

}

#endif
