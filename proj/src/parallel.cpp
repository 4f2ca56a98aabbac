#include "sdgm/parallel.hpp"

#ifdef SDGM_HAVE_OPENMP
#include <omp.h>
#endif

namespace sdgm {

#ifdef SDGM_HAVE_OPENMP
void set_num_threads(int n)
{
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}

int num_threads()
{
    return omp_get_max_threads();
}

bool parallel_enabled()
{
    return true;
}
#else
void set_num_threads(int) {}

int num_threads()
{
    return 1;
}

bool parallel_enabled()
{
    return false;
}
#endif

} // namespace sdgm
