/* skip_spaces from lib/string_helpers.c; isspace() is the ctype macro, inlined. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures s <= skip_spaces(s) <= s + strlen(s);
  @  @ ensures strlen(skip_spaces(s)) == strlen(s) - (skip_spaces(s) - s);
  @  @/
  @ void skip_spaces_in_range(const char *s)
  @ {
  @   if (*s == ' ' || (*s >= '\t' && *s <= '\r'))
  @     skip_spaces_in_range(s + 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures valid_str(skip_spaces(s));
  @  @ ensures !is_space(*skip_spaces(s));
  @  @/
  @ void skip_spaces_stops(const char *s)
  @ {
  @   if (*s == ' ' || (*s >= '\t' && *s <= '\r'))
  @     skip_spaces_stops(s + 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i < skip_spaces(s) - s;
  @  @ decreases i;
  @  @ ensures is_space(s[i]);
  @  @/
  @ void skip_spaces_skipped(const char *s, size_t i)
  @ {
  @   skip_spaces_in_range(s);
  @   if (i > 0 && (*s == ' ' || (*s >= '\t' && *s <= '\r')))
  @     skip_spaces_skipped(s + 1, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(s);
  @  @ assigns \nothing;
  @  @ ensures \result == skip_spaces(s) - s;
  @  @/
  @ size_t count_leading_spaces(const char *s)
  @ {
  @   size_t n = 0;
  @   skip_spaces_in_range(s);
  @   /@ loop invariant 0 <= n <= skip_spaces(s) - s;
  @    @ loop invariant skip_spaces(s + n) == skip_spaces(s);
  @    @ loop invariant valid_str(s + n);
  @    @ loop variant skip_spaces(s) - s - n;
  @    @/
  @   while (s[n] == ' ' || (s[n] >= '\t' && s[n] <= '\r')) {
  @     skip_spaces_in_range(s + n);
  @     n++;
  @   }
  @   return n;
  @ }
  @*/

/*@ requires valid_str(str);
  @ assigns \nothing;
  @ ensures \result == skip_spaces(str);
  @ ensures str <= \result <= str + strlen(str);
  @ ensures valid_str(\result) && !is_space(*\result);
  @*/
char *skip_spaces(const char *str)
{
    /*@ loop invariant \old(str) <= str <= \old(str) + strlen(\old(str));
      @ loop invariant valid_str(str);
      @ loop invariant strlen(str) == strlen(\old(str)) - (str - \old(str));
      @ loop invariant skip_spaces(str) == skip_spaces(\old(str));
      @ loop variant strlen(str);
      @*/
    while (*str == ' ' || (*str >= '\t' && *str <= '\r'))
        ++str;
    return (char *)str;
}
