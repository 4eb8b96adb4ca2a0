// placeholder
namespace invspec { namespace detail { int p_serialize; } }
