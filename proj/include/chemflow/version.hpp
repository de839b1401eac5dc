#ifndef CHEMFLOW_VERSION_HPP
#define CHEMFLOW_VERSION_HPP

namespace chemflow {

inline constexpr const char* kCodeVersion = "chemflow 0.1.0";

} // namespace chemflow

#endif
