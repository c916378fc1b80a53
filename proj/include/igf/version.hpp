#ifndef IGF_VERSION_HPP
#define IGF_VERSION_HPP

namespace igf {

inline constexpr const char* library_version = "0.1.0";

}

#endif
