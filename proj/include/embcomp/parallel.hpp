#pragma once

namespace embcomp {

// Thread count used by the OpenMP kernels. n <= 0 leaves the runtime default.
void set_threads(int n);
int max_threads();

}  // namespace embcomp
