#include "qamp/kernels.hpp"

#include <cstdlib>
#include <string>

namespace qamp::kernels {

namespace {

const Backend* pick_auto()
{
    if (const Backend* b = avx2_backend()) return b;
    return &scalar_backend();
}

const Backend* initial()
{
    if (const char* env = std::getenv("QAMP_KERNELS")) {
        std::string_view v(env);
        if (v == "scalar") return &scalar_backend();
        if (v == "avx2" && avx2_backend()) return avx2_backend();
    }
    return pick_auto();
}

const Backend*& current()
{
    static const Backend* b = initial();
    return b;
}

} // namespace

const Backend& backend() { return *current(); }

bool set_backend(std::string_view name)
{
    if (name == "scalar") { current() = &scalar_backend(); return true; }
    if (name == "avx2") {
        if (const Backend* b = avx2_backend()) { current() = b; return true; }
        return false;
    }
    if (name == "auto") { current() = pick_auto(); return true; }
    return false;
}

} // namespace qamp::kernels
